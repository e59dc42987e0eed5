#pragma once

#include <memory>
#include <string>

#include "sspec/qmatrix.hpp"

namespace sspec {

enum class SpectrumKind { S, FredholmS, WeylS, BoundaryS };

/// Spheres excluded from a comparison: none, the origin {0}, or the nonreal
/// purely imaginary spheres H_{p,0} (re = 0, rad > 0).
enum class ExclusionSet { None, Zero, Hp0 };

struct SpectrumReport {
    SpectrumKind kind;
    std::vector<Sphere> spheres;
    ExclusionSet excluded = ExclusionSet::None;
};

/// A homomorphism from a concrete two-sided matrix algebra into a matrix
/// algebra, together with the per-instance decision procedures the abstract
/// definitions do not provide (kernel membership, Weyl membership).
class Homomorphism {
  public:
    virtual ~Homomorphism() = default;

    virtual std::string name() const = 0;
    /// Image of v in the target algebra.
    virtual QMatrix apply(const QMatrix& v) const = 0;
    /// v in the kernel of the homomorphism, up to tol.
    virtual bool in_kernel(const QMatrix& v, double tol) const = 0;
    /// Decision procedure for v in V^{-1} + ker(A).
    virtual bool is_weyl(const QMatrix& v, double tol) const = 0;
    /// Throws if v does not belong to the source algebra.
    virtual void validate_element(const QMatrix& v, double tol) const = 0;
};

/// The identity map on the full matrix algebra: trivial kernel, Weyl equals
/// invertible.
class IdentityHom final : public Homomorphism {
  public:
    explicit IdentityHom(int n) : n_(n) {}
    std::string name() const override { return "identity"; }
    QMatrix apply(const QMatrix& v) const override;
    bool in_kernel(const QMatrix& v, double tol) const override;
    bool is_weyl(const QMatrix& v, double tol) const override;
    void validate_element(const QMatrix& v, double tol) const override;

  private:
    int n_;
};

/// Source algebra: 2-block upper-triangular matrices [[D1, U], [0, D2]] with
/// block sizes (n1, n2). The homomorphism kills the U block; its kernel (the
/// strictly upper block) is a two-sided ideal. Weyl membership is equivalent
/// to both diagonal blocks being invertible.
class BlockTriangularHom final : public Homomorphism {
  public:
    BlockTriangularHom(int n1, int n2) : n1_(n1), n2_(n2) {
        if (n1 < 1 || n2 < 1) throw std::domain_error("BlockTriangularHom: bad split");
    }
    std::string name() const override { return "block-triangular"; }
    QMatrix apply(const QMatrix& v) const override;
    bool in_kernel(const QMatrix& v, double tol) const override;
    bool is_weyl(const QMatrix& v, double tol) const override;
    void validate_element(const QMatrix& v, double tol) const override;

    int n1() const { return n1_; }
    int n2() const { return n2_; }
    QMatrix block1(const QMatrix& v) const;
    QMatrix block2(const QMatrix& v) const;
    /// Assembles [[D1, U], [0, D2]].
    QMatrix assemble(const QMatrix& d1, const QMatrix& u, const QMatrix& d2) const;

  private:
    int n1_, n2_;
};

bool is_fredholm_element(const Homomorphism& h, const QMatrix& v);
bool is_weyl_element(const Homomorphism& h, const QMatrix& v, double tol = 1e-9);

/// sigma_S of the image of v: the S-spectrum relative to the homomorphism.
SpectrumReport fredholm_s_spectrum(const Homomorphism& h, const QMatrix& v);

/// Spheres of sigma_S(v) whose characteristic element is not a Weyl element.
SpectrumReport weyl_s_spectrum(const Homomorphism& h, const QMatrix& v);

/// Residual of the algebraic identity
/// R_q(b) R_q(a)/|q|^2 = R_q(a+b) - ab - ba
///                       + (b^2 a^2 - 2Re(q)(b^2 a + b a^2 - 2Re(q) ba))/|q|^2.
/// Must vanish (up to roundoff) for every pair; q must be nonzero.
double sum_identity_residual(const Quaternion& q, const QMatrix& a, const QMatrix& b);

/// Sphere-set comparison with Hausdorff-style tolerance in (re, rad).
struct SetComparison {
    std::vector<Sphere> lhs;
    std::vector<Sphere> rhs;
    double hausdorff;
    bool equal;
};

SetComparison compare_sphere_sets(std::vector<Sphere> lhs, std::vector<Sphere> rhs,
                                  double tol = 1e-7);

/// Removes spheres in the exclusion set (tolerance-aware).
std::vector<Sphere> exclude_spheres(const std::vector<Sphere>& in, ExclusionSet what,
                                    double tol = 1e-7);

/// Union law for the Fredholm S-spectrum of a sum: requires ab and ba in
/// ker(A). weyl = true compares the Weyl S-spectra instead.
SetComparison theorem_sum_spectra(const Homomorphism& h, const QMatrix& a,
                                  const QMatrix& b, bool weyl = false,
                                  double tol = 1e-7);

/// The image of a sphere under q -> conj(q)/|q|^2.
Sphere invert_sphere(const Sphere& s);

/// Compares sigma^Phi(a^{-1}) against the q -> conj(q)/|q|^2 image of
/// sigma^Phi(a). a must be invertible.
SetComparison inverse_spectral_map(const Homomorphism& h, const QMatrix& a,
                                   double tol = 1e-7);

/// Compares sigma^Phi(v1 v2) and sigma^Phi(v2 v1) off H_{p,0}.
SetComparison product_spectra_off_imaginaries(const Homomorphism& h, const QMatrix& v1,
                                              const QMatrix& v2, double tol = 1e-7);

/// Boundary S-spectrum for the matrix algebra: equals sigma_S (invertibles are
/// dense), each sphere certified by an explicit invertible element within
/// eps of the characteristic element in operator norm.
SpectrumReport boundary_s_spectrum(const QMatrix& v, double eps = 1e-6);

/// Boundary analogue of inverse_spectral_map.
SetComparison inversion_of_boundary(const QMatrix& v, double tol = 1e-7);

struct NullSequenceStep {
    double res_left;       // || R_q(a) b_n ||
    double res_right;      // || b_n R_q(a) ||
    double bound;          // 1/||R_{q_n}^{-1}|| + 2||a|| |Re(q_n - q)| + ||q|^2 - |q_n|^2|
    double resolvent_norm; // || R_{q_n}(a)^{-1} ||
};

/// Approximate-null-sequence construction at a boundary spectral point q along
/// an off-spectrum sequence qs -> q: b_n = normalized R_{q_n}(a)^{-1}.
std::vector<NullSequenceStep> approx_null_sequence(const QMatrix& a, const Quaternion& q,
                                                   const std::vector<Quaternion>& qs);

void to_json(nlohmann::json& j, const SpectrumReport& r);

}  // namespace sspec
