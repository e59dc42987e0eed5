#include "sspec/qmatrix.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cstdlib>
#include <thread>

namespace sspec {

Eigen::MatrixXcd complex_adjoint(const QMatrix& A) {
    const int n = A.n();
    Eigen::MatrixXcd M(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            auto [a, b] = A(i, j).complex_parts();
            M(i, j) = a;
            M(i, n + j) = b;
            M(n + i, j) = -std::conj(b);
            M(n + i, n + j) = std::conj(a);
        }
    return M;
}

QMatrix from_complex_adjoint(const Eigen::MatrixXcd& M) {
    const int n = static_cast<int>(M.rows()) / 2;
    if (M.rows() != 2 * n || M.cols() != 2 * n)
        throw std::invalid_argument("from_complex_adjoint: need even square matrix");
    QMatrix A(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            A(i, j) = Quaternion::from_complex_parts(M(i, j), M(i, n + j));
    return A;
}

namespace {

Eigen::VectorXd singular_values(const Eigen::MatrixXcd& M) {
    if (M.rows() <= 24) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
        return svd.singularValues();
    }
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(M);
    return svd.singularValues();
}

}  // namespace

double default_invertibility_tol(const QMatrix& A) {
    return 1e-9 * std::max(1.0, op_norm(A));
}

InvertibilityWitness is_invertible(const QMatrix& A, double tol) {
    if (tol <= 0) throw std::domain_error("is_invertible: tol must be positive");
    Eigen::VectorXd sv = singular_values(complex_adjoint(A));
    double smin = sv(sv.size() - 1);
    return {smin > tol, smin};
}

InvertibilityWitness is_invertible(const QMatrix& A) {
    return is_invertible(A, default_invertibility_tol(A));
}

double op_norm(const QMatrix& A) {
    Eigen::VectorXd sv = singular_values(complex_adjoint(A));
    return sv(0);
}

QMatrix inverse(const QMatrix& A) {
    Eigen::MatrixXcd chi = complex_adjoint(A);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(chi, Eigen::ComputeThinU | Eigen::ComputeThinV);
    double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (smin <= 1e-13 * std::max(1.0, svd.singularValues()(0)))
        throw std::domain_error("QMatrix inverse: matrix is numerically singular");
    Eigen::MatrixXcd inv = chi.partialPivLu().inverse();
    return from_complex_adjoint(inv);
}

QMatrix char_elem(const QMatrix& A, const Quaternion& q) {
    QMatrix r = A * A - A.scale(2.0 * q.re());
    double n2 = q.norm2();
    for (int i = 0; i < A.n(); ++i) r(i, i) = r(i, i) + Quaternion(n2);
    return r;
}

std::vector<Sphere> s_spectrum_exact(const QMatrix& A, double dedup_tol) {
    Eigen::MatrixXcd chi = complex_adjoint(A);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(chi, false);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("s_spectrum_exact: eigen solver failed");

    std::vector<Sphere> spheres;
    for (int k = 0; k < es.eigenvalues().size(); ++k) {
        std::complex<double> lam = es.eigenvalues()(k);
        // Eigenvalues pair conjugately; keep the closed upper half-plane.
        if (lam.imag() < -dedup_tol) continue;
        Sphere s(lam.real(), std::abs(lam.imag()));
        bool dup = false;
        for (auto& t : spheres)
            if (t.approx_equal(s, dedup_tol)) {
                dup = true;
                break;
            }
        if (!dup) spheres.push_back(s);
    }
    std::sort(spheres.begin(), spheres.end(), [](const Sphere& a, const Sphere& b) {
        return a.re != b.re ? a.re < b.re : a.rad < b.rad;
    });

    // Self-verification: the S-spectrum is defined by non-invertibility of the
    // characteristic element, not by chi eigenvalues. Each sphere must make
    // R_q(A) singular at sampled members.
    double scale = std::max(1.0, op_norm(A));
    double verify_tol = 1e-6 * scale * scale;
    for (const auto& s : spheres)
        for (const auto& p : sample_sphere(s, 4)) {
            auto w = is_invertible(char_elem(A, p), verify_tol);
            if (w.invertible)
                throw std::runtime_error(
                    "s_spectrum_exact: sphere failed singularity self-check");
        }
    return spheres;
}

namespace {

int thread_cap() {
    if (const char* env = std::getenv("SSPEC_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace

ScanResult s_spectrum_scan(const QMatrix& A, const GridSpec& grid) {
    grid.validate();
    const int nu = grid.nu(), nr = grid.nr();
    ScanResult res{grid, std::vector<double>(static_cast<size_t>(nu) * nr, 0.0)};

    int nthreads = std::min(thread_cap(), nu);
    auto worker = [&](int t) {
        for (int iu = t; iu < nu; iu += nthreads)
            for (int ir = 0; ir < nr; ++ir) {
                Quaternion q{grid.u(iu), grid.r(ir), 0, 0};
                Eigen::VectorXd sv = singular_values(complex_adjoint(char_elem(A, q)));
                res.sigma_min[static_cast<size_t>(iu) * nr + ir] = sv(sv.size() - 1);
            }
    };
    if (nthreads <= 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }
    return res;
}

void to_json(nlohmann::json& j, const QMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.n(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int jj = 0; jj < m.n(); ++jj) row.push_back(m(i, jj));
        rows.push_back(row);
    }
    j = nlohmann::json{{"n", m.n()}, {"entries", rows}};
}

void from_json(const nlohmann::json& j, QMatrix& m) {
    int n = j.at("n").get<int>();
    const auto& rows = j.at("entries");
    if (!rows.is_array() || static_cast<int>(rows.size()) != n)
        throw std::invalid_argument("QMatrix JSON: entries must be n rows");
    m = QMatrix(n);
    for (int i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw std::invalid_argument("QMatrix JSON: row length mismatch");
        for (int jj = 0; jj < n; ++jj) m(i, jj) = row[static_cast<size_t>(jj)].get<Quaternion>();
    }
}

}  // namespace sspec
