#include "sspec/sresolvent.hpp"

namespace sspec {

QMatrix s_resolvent_left(const QMatrix& A, const Quaternion& q) {
    QMatrix R = char_elem(A, q);
    auto w = is_invertible(R, default_invertibility_tol(R));
    if (!w.invertible)
        throw SpectralPointError("s_resolvent_left: q lies on the S-spectrum (sigma_min=" +
                                 std::to_string(w.sigma_min) + ")");
    QMatrix shifted = A;  // A - conj(q) I
    Quaternion qc = q.conj();
    for (int i = 0; i < A.n(); ++i) shifted(i, i) = shifted(i, i) - qc;
    return -(inverse(R) * shifted);
}

namespace {

void require_convergent(const QMatrix& A, const Quaternion& q, const char* who) {
    if (op_norm(A) >= q.norm())
        throw DivergenceDomainError(std::string(who) + ": requires ||A|| < |q|");
}

}  // namespace

QMatrix cauchy_partial_sum(const QMatrix& A, const Quaternion& q, int N) {
    require_convergent(A, q, "cauchy_partial_sum");
    Quaternion qinv = q.inverse();
    QMatrix power = QMatrix::identity(A.n());  // A^n
    Quaternion qpow = qinv;                    // q^{-1-n}
    QMatrix sum = power.right_scalar(qpow);
    for (int n = 1; n <= N; ++n) {
        power = power * A;
        qpow = qpow * qinv;
        sum = sum + power.right_scalar(qpow);
    }
    return sum;
}

double series_inverse_identity(const QMatrix& A, const Quaternion& q, int N) {
    require_convergent(A, q, "series_inverse_identity");
    QMatrix shifted = A;
    Quaternion qc = q.conj();
    for (int i = 0; i < A.n(); ++i) shifted(i, i) = shifted(i, i) - qc;
    auto w = is_invertible(shifted, default_invertibility_tol(shifted));
    if (!w.invertible)
        throw SpectralPointError("series_inverse_identity: A - conj(q) I is singular");
    QMatrix candidate = -(inverse(shifted) * char_elem(A, q));
    QMatrix prod = cauchy_partial_sum(A, q, N) * candidate;
    return op_norm(prod - QMatrix::identity(A.n()));
}

std::vector<Quaternion> series_coefficients(const Quaternion& q, int N) {
    if (q.norm2() == 0.0) throw std::domain_error("series_coefficients: q must be nonzero");
    std::vector<Quaternion> a;
    a.reserve(static_cast<size_t>(N) + 1);
    double n2 = q.norm2();
    Quaternion qc = q.conj();
    for (int n = 0; n <= N; ++n) {
        Quaternion s(0.0);
        for (int h = 0; h <= n; ++h) s = s + q.pow(h) * qc.pow(n - h);
        a.push_back(s / std::pow(n2, n + 1));
    }
    return a;
}

double coefficient_inverse(const QMatrix& A, const Quaternion& q, int N) {
    require_convergent(A, q, "coefficient_inverse");
    std::vector<Quaternion> a = series_coefficients(q, N);
    QMatrix power = QMatrix::identity(A.n());
    QMatrix sum = power.right_scalar(a[0]);
    for (int n = 1; n <= N; ++n) {
        power = power * A;
        sum = sum + power.right_scalar(a[static_cast<size_t>(n)]);
    }
    return op_norm(char_elem(A, q) * sum - QMatrix::identity(A.n()));
}

double slice_regularity_residual(
    const std::function<QMatrix(double, double)>& f_on_slice, double q0, double q1,
    const ImaginaryUnit& axis, double h) {
    if (h <= 0) throw std::domain_error("slice_regularity_residual: h must be positive");
    QMatrix d0 = (f_on_slice(q0 + h, q1) - f_on_slice(q0 - h, q1)).scale(1.0 / (2.0 * h));
    QMatrix d1 = (f_on_slice(q0, q1 + h) - f_on_slice(q0, q1 - h)).scale(1.0 / (2.0 * h));
    // d-bar_I f = (1/2)(d/dq0 f + (d/dq1 f) I), the axis acting on the right.
    return op_norm((d0 + d1.right_scalar(axis.value())).scale(0.5));
}

double slice_regularity_residual(const QMatrix& A, double q0, double q1,
                                 const ImaginaryUnit& axis, double h) {
    Quaternion I = axis.value();
    auto f = [&](double u, double v) {
        return s_resolvent_left(A, Quaternion(u) + I * v);
    };
    return slice_regularity_residual(f, q0, q1, axis, h);
}

}  // namespace sspec
