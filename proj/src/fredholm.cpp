#include "sspec/fredholm.hpp"

#include <algorithm>

#include "sspec/sresolvent.hpp"

namespace sspec {

// ---------------------------------------------------------------------------
// Homomorphism instances

QMatrix IdentityHom::apply(const QMatrix& v) const { return v; }
bool IdentityHom::in_kernel(const QMatrix& v, double tol) const {
    return v.max_abs() <= tol;
}
bool IdentityHom::is_weyl(const QMatrix& v, double tol) const {
    return is_invertible(v, std::max(tol, default_invertibility_tol(v))).invertible;
}
void IdentityHom::validate_element(const QMatrix& v, double) const {
    if (v.n() != n_) throw std::invalid_argument("IdentityHom: wrong matrix size");
}

QMatrix BlockTriangularHom::block1(const QMatrix& v) const {
    QMatrix d(n1_);
    for (int i = 0; i < n1_; ++i)
        for (int j = 0; j < n1_; ++j) d(i, j) = v(i, j);
    return d;
}
QMatrix BlockTriangularHom::block2(const QMatrix& v) const {
    QMatrix d(n2_);
    for (int i = 0; i < n2_; ++i)
        for (int j = 0; j < n2_; ++j) d(i, j) = v(n1_ + i, n1_ + j);
    return d;
}
QMatrix BlockTriangularHom::assemble(const QMatrix& d1, const QMatrix& u,
                                     const QMatrix& d2) const {
    if (d1.n() != n1_ || d2.n() != n2_)
        throw std::invalid_argument("BlockTriangularHom::assemble: block size mismatch");
    QMatrix v(n1_ + n2_);
    for (int i = 0; i < n1_; ++i)
        for (int j = 0; j < n1_; ++j) v(i, j) = d1(i, j);
    for (int i = 0; i < n2_; ++i)
        for (int j = 0; j < n2_; ++j) v(n1_ + i, n1_ + j) = d2(i, j);
    for (int i = 0; i < n1_; ++i)
        for (int j = 0; j < n2_; ++j) v(i, n1_ + j) = u(i, j);
    return v;
}

QMatrix BlockTriangularHom::apply(const QMatrix& v) const {
    validate_element(v, 1e-9);
    QMatrix out = v;
    for (int i = 0; i < n1_; ++i)
        for (int j = 0; j < n2_; ++j) out(i, n1_ + j) = Quaternion();
    return out;
}
bool BlockTriangularHom::in_kernel(const QMatrix& v, double tol) const {
    validate_element(v, tol);
    return apply(v).max_abs() <= tol;
}
bool BlockTriangularHom::is_weyl(const QMatrix& v, double tol) const {
    validate_element(v, tol);
    // v = w + c with w invertible block-triangular and c strictly upper iff
    // both diagonal blocks are invertible.
    QMatrix d1 = block1(v), d2 = block2(v);
    return is_invertible(d1, std::max(tol, default_invertibility_tol(d1))).invertible &&
           is_invertible(d2, std::max(tol, default_invertibility_tol(d2))).invertible;
}
void BlockTriangularHom::validate_element(const QMatrix& v, double tol) const {
    if (v.n() != n1_ + n2_)
        throw std::invalid_argument("BlockTriangularHom: wrong matrix size");
    for (int i = 0; i < n2_; ++i)
        for (int j = 0; j < n1_; ++j)
            if (v(n1_ + i, j).norm() > std::max(tol, 1e-9))
                throw std::invalid_argument(
                    "BlockTriangularHom: element has nonzero lower-left block");
}

// ---------------------------------------------------------------------------
// Fredholm / Weyl predicates and spectra

bool is_fredholm_element(const Homomorphism& h, const QMatrix& v) {
    QMatrix w = h.apply(v);
    return is_invertible(w, default_invertibility_tol(w)).invertible;
}

bool is_weyl_element(const Homomorphism& h, const QMatrix& v, double tol) {
    return h.is_weyl(v, tol);
}

SpectrumReport fredholm_s_spectrum(const Homomorphism& h, const QMatrix& v) {
    return {SpectrumKind::FredholmS, s_spectrum_exact(h.apply(v)), ExclusionSet::None};
}

SpectrumReport weyl_s_spectrum(const Homomorphism& h, const QMatrix& v) {
    // Weyl spectrum is sandwiched between the Fredholm spectrum and sigma_S;
    // scan the sigma_S spheres and keep those whose characteristic element
    // fails the Weyl decision at sampled members.
    std::vector<Sphere> out;
    for (const auto& s : s_spectrum_exact(v)) {
        bool weyl_everywhere = true;
        for (const auto& p : sample_sphere(s, 3))
            if (!h.is_weyl(char_elem(v, p), 1e-9)) {
                weyl_everywhere = false;
                break;
            }
        if (!weyl_everywhere) out.push_back(s);
    }
    return {SpectrumKind::WeylS, out, ExclusionSet::None};
}

// ---------------------------------------------------------------------------
// Identity (e1) and sphere-set machinery

double sum_identity_residual(const Quaternion& q, const QMatrix& a, const QMatrix& b) {
    if (q.norm2() == 0.0)
        throw std::domain_error("sum_identity_residual: q must be nonzero");
    double m2 = q.norm2();
    double re2 = 2.0 * q.re();
    QMatrix lhs = (char_elem(b, q) * char_elem(a, q)).scale(1.0 / m2);
    QMatrix a2 = a * a, b2 = b * b;
    QMatrix corr = (b2 * a2 - (b2 * a + b * a2 - (b * a).scale(re2)).scale(re2)).scale(1.0 / m2);
    QMatrix rhs = char_elem(a + b, q) - a * b - b * a + corr;
    return op_norm(lhs - rhs);
}

SetComparison compare_sphere_sets(std::vector<Sphere> lhs, std::vector<Sphere> rhs,
                                  double tol) {
    auto directed = [&](const std::vector<Sphere>& from, const std::vector<Sphere>& to) {
        double worst = 0.0;
        for (const auto& s : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& t : to)
                best = std::min(best, std::hypot(s.re - t.re, s.rad - t.rad));
            if (to.empty()) best = s.rad + std::abs(s.re) + 1.0;
            worst = std::max(worst, best);
        }
        return worst;
    };
    double h = std::max(directed(lhs, rhs), directed(rhs, lhs));
    return {std::move(lhs), std::move(rhs), h, h <= tol};
}

std::vector<Sphere> exclude_spheres(const std::vector<Sphere>& in, ExclusionSet what,
                                    double tol) {
    std::vector<Sphere> out;
    for (const auto& s : in) {
        bool drop = false;
        switch (what) {
            case ExclusionSet::None: break;
            case ExclusionSet::Zero:
                drop = std::abs(s.re) <= tol && s.rad <= tol;
                break;
            case ExclusionSet::Hp0:
                drop = std::abs(s.re) <= tol && s.rad > tol;
                break;
        }
        if (!drop) out.push_back(s);
    }
    return out;
}

namespace {

std::vector<Sphere> dedup_union(std::vector<Sphere> a, const std::vector<Sphere>& b,
                                double tol) {
    for (const auto& s : b) {
        bool dup = false;
        for (const auto& t : a)
            if (t.approx_equal(s, tol)) {
                dup = true;
                break;
            }
        if (!dup) a.push_back(s);
    }
    return a;
}

}  // namespace

SetComparison theorem_sum_spectra(const Homomorphism& h, const QMatrix& a,
                                  const QMatrix& b, bool weyl, double tol) {
    double scale = std::max({1.0, op_norm(a), op_norm(b)});
    if (!h.in_kernel(a * b, 1e-9 * scale * scale) ||
        !h.in_kernel(b * a, 1e-9 * scale * scale))
        throw std::invalid_argument("theorem_sum_spectra: ab and ba must lie in ker(A)");
    auto spec = [&](const QMatrix& v) {
        return weyl ? weyl_s_spectrum(h, v).spheres : fredholm_s_spectrum(h, v).spheres;
    };
    std::vector<Sphere> lhs = exclude_spheres(spec(a + b), ExclusionSet::Zero, tol);
    std::vector<Sphere> rhs =
        exclude_spheres(dedup_union(spec(a), spec(b), tol), ExclusionSet::Zero, tol);
    return compare_sphere_sets(std::move(lhs), std::move(rhs), tol);
}

Sphere invert_sphere(const Sphere& s) {
    double m2 = s.re * s.re + s.rad * s.rad;
    if (m2 == 0.0) throw std::domain_error("invert_sphere: cannot invert the origin");
    return Sphere(s.re / m2, s.rad / m2);
}

SetComparison inverse_spectral_map(const Homomorphism& h, const QMatrix& a, double tol) {
    auto w = is_invertible(a, default_invertibility_tol(a));
    if (!w.invertible) throw std::domain_error("inverse_spectral_map: a is singular");
    std::vector<Sphere> lhs = fredholm_s_spectrum(h, inverse(a)).spheres;
    std::vector<Sphere> rhs;
    for (const auto& s : fredholm_s_spectrum(h, a).spheres) rhs.push_back(invert_sphere(s));
    return compare_sphere_sets(std::move(lhs), std::move(rhs), tol);
}

SetComparison product_spectra_off_imaginaries(const Homomorphism& h, const QMatrix& v1,
                                              const QMatrix& v2, double tol) {
    std::vector<Sphere> lhs =
        exclude_spheres(fredholm_s_spectrum(h, v1 * v2).spheres, ExclusionSet::Hp0, tol);
    std::vector<Sphere> rhs =
        exclude_spheres(fredholm_s_spectrum(h, v2 * v1).spheres, ExclusionSet::Hp0, tol);
    return compare_sphere_sets(std::move(lhs), std::move(rhs), tol);
}

SpectrumReport boundary_s_spectrum(const QMatrix& v, double eps) {
    // In a matrix algebra the invertibles are dense, so the non-invertible set
    // equals its own boundary and B_{S,d}(v) = sigma_S(v). The density claim
    // is kept checkable: every sphere must admit an invertible element within
    // eps of R_q(v).
    std::vector<Sphere> spheres = s_spectrum_exact(v);
    for (const auto& s : spheres) {
        QMatrix R = char_elem(v, s.representative());
        bool certified = false;
        for (double delta : {eps / 64, eps / 16, eps / 4, eps / 2, eps}) {
            QMatrix pert = R;
            for (int i = 0; i < R.n(); ++i) pert(i, i) = pert(i, i) + Quaternion(delta);
            if (is_invertible(pert, 1e-12 * std::max(1.0, op_norm(pert))).invertible) {
                certified = true;
                break;
            }
        }
        if (!certified)
            throw std::runtime_error(
                "boundary_s_spectrum: failed to certify sphere by an invertible "
                "eps-perturbation");
    }
    return {SpectrumKind::BoundaryS, std::move(spheres), ExclusionSet::None};
}

SetComparison inversion_of_boundary(const QMatrix& v, double tol) {
    auto w = is_invertible(v, default_invertibility_tol(v));
    if (!w.invertible) throw std::domain_error("inversion_of_boundary: v is singular");
    std::vector<Sphere> lhs = boundary_s_spectrum(inverse(v)).spheres;
    std::vector<Sphere> rhs;
    for (const auto& s : boundary_s_spectrum(v).spheres) rhs.push_back(invert_sphere(s));
    return compare_sphere_sets(std::move(lhs), std::move(rhs), tol);
}

std::vector<NullSequenceStep> approx_null_sequence(const QMatrix& a, const Quaternion& q,
                                                   const std::vector<Quaternion>& qs) {
    QMatrix Rq = char_elem(a, q);
    double anorm = op_norm(a);
    std::vector<NullSequenceStep> steps;
    steps.reserve(qs.size());
    for (const auto& qn : qs) {
        QMatrix Rn = char_elem(a, qn);
        auto w = is_invertible(Rn, default_invertibility_tol(Rn));
        if (!w.invertible)
            throw SpectralPointError("approx_null_sequence: q_n lies on the S-spectrum");
        QMatrix inv = inverse(Rn);
        double inv_norm = op_norm(inv);
        QMatrix bn = inv.scale(1.0 / inv_norm);
        double bound = 1.0 / inv_norm + anorm * 2.0 * std::abs((qn - q).re()) +
                       std::abs(q.norm2() - qn.norm2());
        steps.push_back({op_norm(Rq * bn), op_norm(bn * Rq), bound, inv_norm});
    }
    return steps;
}

void to_json(nlohmann::json& j, const SpectrumReport& r) {
    const char* kind = "S";
    switch (r.kind) {
        case SpectrumKind::S: kind = "S"; break;
        case SpectrumKind::FredholmS: kind = "FredholmS"; break;
        case SpectrumKind::WeylS: kind = "WeylS"; break;
        case SpectrumKind::BoundaryS: kind = "BoundaryS"; break;
    }
    const char* excl = "none";
    if (r.excluded == ExclusionSet::Zero) excl = "zero";
    if (r.excluded == ExclusionSet::Hp0) excl = "Hp0";
    j = nlohmann::json{{"kind", kind}, {"spheres", r.spheres}, {"excluded", excl}};
}

}  // namespace sspec
