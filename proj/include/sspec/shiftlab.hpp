#pragma once

#include <map>
#include <optional>

#include "sspec/fredholm.hpp"
#include "sspec/qmatrix.hpp"

namespace sspec {

/// Operator of the form  sum_m c_m V^m  +  finite rank  on l^2_H(Z), where
/// (V^m x)_i = x_{i+m} and scalars act on the left through the canonical
/// basis (q e_k = e_k q). A single-power constructor matches the q V^m + F
/// presentation; products and characteristic elements stay in the class by
/// carrying a finite Laurent part. The unilateral variant lives on l^2_H(N)
/// as P+ op P+ with P+ the support projection onto indices >= 0.
class ShiftOp {
  public:
    using FinMap = std::map<std::pair<int, int>, Quaternion>;

    ShiftOp() = default;
    ShiftOp(const Quaternion& coeff, int power, FinMap fin = {}, bool unilateral = false);

    static ShiftOp identity(bool unilateral = false) {
        return ShiftOp(Quaternion(1.0), 0, {}, unilateral);
    }
    /// The bilateral shift V: e_k -> e_{k-1}, (Vx)_i = x_{i+1}.
    static ShiftOp bilateral_shift() { return ShiftOp(Quaternion(1.0), 1); }
    /// The right shift R = V - e_{-1}<e_0, .> : (Rx)_i = x_{i+1} for i != -1,
    /// (Rx)_{-1} = 0.
    static ShiftOp right_shift_R();
    /// The rank-one map T: (Tx)_{-1} = x_0, zero elsewhere.
    static ShiftOp rank_one_T();
    /// The unilateral right shift on l^2_H(N): e_n -> e_{n+1} (power -p for
    /// the p-th power).
    static ShiftOp unilateral_shift(int p = 1);

    bool unilateral() const { return unilateral_; }
    const std::map<int, Quaternion>& laurent() const { return laurent_; }
    const FinMap& fin() const { return fin_; }
    /// Half-width of everything: max |power| and max |fin index|.
    int support_radius() const;
    bool is_zero(double tol = 0.0) const;

    ShiftOp operator+(const ShiftOp& o) const;
    ShiftOp operator-(const ShiftOp& o) const;
    ShiftOp operator-() const;
    ShiftOp operator*(const ShiftOp& o) const;
    ShiftOp left_scalar(const Quaternion& q) const;
    ShiftOp right_scalar(const Quaternion& q) const;
    ShiftOp scale(double s) const;
    ShiftOp adjoint() const;

    /// Exact action on a finitely supported sequence.
    std::map<int, Quaternion> apply(const std::map<int, Quaternion>& x) const;

    /// The spherical characteristic element op^2 - 2 Re(q) op + |q|^2 I.
    ShiftOp char_elem(const Quaternion& q) const;

  private:
    void prune();
    std::map<int, Quaternion> laurent_;
    FinMap fin_;
    bool unilateral_ = false;
};

/// Compression of op to span{e_{-N},...,e_N} (bilateral) or {e_0,...,e_N}
/// (unilateral), as a QMatrix ordered by increasing index.
QMatrix window_matrix(const ShiftOp& op, int N);

struct NormEstimate {
    double value;
    int window;
    bool converged;
};

/// Largest singular value of the windowed compression, refined until two
/// successive windows agree to 1e-9 (monotone from below). No silent
/// extrapolation: the window size and convergence flag are reported.
NormEstimate op_norm_estimate(const ShiftOp& op, int N);

struct IndexResult {
    int dim_ker = 0;    // quaternionic dimension
    int dim_coker = 0;  // quaternionic dimension
    int index = 0;
    bool stable = false;
};

struct IndexInstabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotFredholmError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exact kernel/cokernel dimensions for a single-leading-power operator
/// c V^m + F (bilateral: via the factorization c V^m (I + G); unilateral: via
/// stabilized windowed ranks). Dimensions must agree at window N and N+5.
IndexResult index_of(const ShiftOp& op);

/// Calkin-level Fredholm test for R_q(op): the finite-rank part is compact,
/// so the decision reduces to the 2x2 matrix symbol of the Laurent part on
/// the unit circle (invertible symbol <=> Fredholm).
bool calkin_fredholm_at(const ShiftOp& op, const Quaternion& q);

/// Quaternionic Fredholm index of R_q(op): 0 for bilateral operators; minus
/// half the winding number of det(symbol) for unilateral ones. Throws
/// NotFredholmError when the symbol degenerates on the circle.
int calkin_index_at(const ShiftOp& op, const Quaternion& q);

struct ShiftSpectrumPoint {
    double u, r;
    bool in_fredholm;  // q in the Fredholm (Calkin) S-spectrum
    bool in_weyl;      // q in the Weyl S-spectrum
    int index;         // index of R_q(op) when Fredholm, 0 otherwise
};

/// Grid classification of the Fredholm and Weyl S-spectra over the
/// (Re q, |Im q|) half-plane.
std::vector<ShiftSpectrumPoint> weyl_s_spectrum_shift(const ShiftOp& op,
                                                      const GridSpec& grid);

/// Smallest singular value of the rectangular compression of R_q(op) over
/// unit vectors supported in the window: an upper bound on the distance of q
/// from the approximate S-spectrum, exact over the windowed subspace.
double approx_s_spectrum_residual(const ShiftOp& op, const Quaternion& q, int N);

struct BoundaryWitness {
    double distance;       // measured || R_n - R^2 ||
    double bound;          // 2|q|^n + |q|^{2n}
    double inverse_error;  // worst || R_n (R_n^{-1} y) - y || over test vectors
};

/// The boundary-S-spectrum construction for the right shift: R_n = (R + T q^n)^2
/// is invertible and converges to R^2. Certifies invertibility by applying the
/// explicit inverse and returns the measured distance against the bound.
/// Requires 0 < |q| < 1.
BoundaryWitness boundary_witness_R(const Quaternion& q, int n, int test_vectors = 20,
                                   unsigned seed = 1);

/// Explicit inverse of (R + T p)^2 for p != 0:
/// x_i = p^{-1} y_{i-2} for i in {0, 1}, x_i = y_{i-2} otherwise.
std::map<int, Quaternion> twisted_square_inverse(const Quaternion& p,
                                                 const std::map<int, Quaternion>& y);

struct PathReport {
    std::vector<int> indices;
    bool constant;
};

/// Asserts that the index of R_q(op) is identical along a path of Fredholm
/// points; names the offending point otherwise.
PathReport index_constancy_probe(const ShiftOp& op, const std::vector<Quaternion>& path);

ShiftOp shift_op_from_json(const nlohmann::json& j);
nlohmann::json shift_op_to_json(const ShiftOp& op);

}  // namespace sspec
