#pragma once

#include <functional>

#include "sspec/qmatrix.hpp"

namespace sspec {

/// Thrown when a requested point lies on (or numerically too close to) the
/// S-spectrum of the matrix.
struct SpectralPointError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Thrown when a series is evaluated outside its convergence domain
/// (||A|| >= |q|).
struct DivergenceDomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Left S-resolvent -R_q(A)^{-1} (A - conj(q) I). q must be off the
/// S-spectrum; checked through invertibility of the characteristic element.
QMatrix s_resolvent_left(const QMatrix& A, const Quaternion& q);

/// Partial sum sum_{n=0}^{N} A^n q^{-1-n} of the left Cauchy kernel series.
/// Requires ||A|| < |q|.
QMatrix cauchy_partial_sum(const QMatrix& A, const Quaternion& q, int N);

/// Residual || (partial sum) * [-(A - conj(q) I)^{-1} R_q(A)] - I ||; vanishes
/// as N grows inside the convergence domain.
double series_inverse_identity(const QMatrix& A, const Quaternion& q, int N);

/// The coefficients a_n = |q|^{-2n-2} sum_{h=0}^{n} q^h conj(q)^{n-h},
/// n = 0..N. They satisfy a_0 = |q|^{-2}, -2Re(q) a_0 + |q|^2 a_1 = 0 and
/// a_{n-2} - 2Re(q) a_{n-1} + |q|^2 a_n = 0 for n > 1.
std::vector<Quaternion> series_coefficients(const Quaternion& q, int N);

/// Residual || R_q(A) (sum_{n<=N} A^n a_n) - I ||. Requires ||A|| < |q|.
double coefficient_inverse(const QMatrix& A, const Quaternion& q, int N);

/// Central-difference estimate of the per-slice Wirtinger residual
/// || (1/2)(d/dq0 f + (d/dq1 f) I) || for a matrix-valued f on the slice C_I;
/// the I factor multiplies on the right. Expected O(h^2) for slice-regular f.
double slice_regularity_residual(
    const std::function<QMatrix(double, double)>& f_on_slice, double q0, double q1,
    const ImaginaryUnit& axis, double h);

/// The same residual for f(q) = S_L^{-1}(q, A) at q = q0 + I q1. All five
/// stencil points must be off the S-spectrum.
double slice_regularity_residual(const QMatrix& A, double q0, double q1,
                                 const ImaginaryUnit& axis, double h);

}  // namespace sspec
