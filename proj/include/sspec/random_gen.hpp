#pragma once

#include <random>

#include "sspec/qmatrix.hpp"

namespace sspec {

/// Seeded generators shared by the verification harness and the test suites.
/// All draws are deterministic functions of the generator state.

inline Quaternion random_quaternion(std::mt19937_64& rng, double amp = 1.0) {
    std::uniform_real_distribution<double> u(-amp, amp);
    return {u(rng), u(rng), u(rng), u(rng)};
}

inline Quaternion random_unit_quaternion(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Quaternion q{g(rng), g(rng), g(rng), g(rng)};
    double n = q.norm();
    if (n < 1e-12) return Quaternion(1.0);
    return q / n;
}

inline QMatrix random_qmatrix(std::mt19937_64& rng, int n, double amp = 1.0) {
    QMatrix A(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = random_quaternion(rng, amp);
    return A;
}

/// Random matrix rescaled so the operator norm does not exceed cap.
inline QMatrix random_qmatrix_norm_capped(std::mt19937_64& rng, int n, double cap) {
    QMatrix A = random_qmatrix(rng, n);
    double nrm = op_norm(A);
    if (nrm > cap) A = A.scale(cap / nrm);
    return A;
}

/// Random quaternionic unitary by Gram-Schmidt over H (right scalar
/// coefficients) on a random matrix; columns are orthonormal for the form
/// <x, y> = sum conj(x_i) y_i.
inline QMatrix random_unitary(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::vector<Quaternion>> cols(static_cast<size_t>(n));
    for (auto& c : cols) {
        c.resize(static_cast<size_t>(n));
        for (auto& q : c) q = {g(rng), g(rng), g(rng), g(rng)};
    }
    for (int j = 0; j < n; ++j) {
        auto& cj = cols[static_cast<size_t>(j)];
        for (int k = 0; k < j; ++k) {
            const auto& ck = cols[static_cast<size_t>(k)];
            Quaternion proj(0.0);  // <c_k, c_j>
            for (int i = 0; i < n; ++i)
                proj = proj + ck[static_cast<size_t>(i)].conj() * cj[static_cast<size_t>(i)];
            for (int i = 0; i < n; ++i)
                cj[static_cast<size_t>(i)] =
                    cj[static_cast<size_t>(i)] - ck[static_cast<size_t>(i)] * proj;
        }
        double nrm2 = 0.0;
        for (const auto& q : cj) nrm2 += q.norm2();
        double nrm = std::sqrt(nrm2);
        if (nrm < 1e-9) throw std::runtime_error("random_unitary: degenerate draw");
        for (auto& q : cj) q = q / nrm;
    }
    QMatrix U(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) U(i, j) = cols[static_cast<size_t>(j)][static_cast<size_t>(i)];
    return U;
}

}  // namespace sspec
