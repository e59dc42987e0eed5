#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace sspec {

/// A quaternion q = w + i x + j y + k z with double components.
/// Values are immutable in spirit: all operations return new values.
struct Quaternion {
    double w = 0.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Quaternion() = default;
    constexpr Quaternion(double w_, double x_, double y_, double z_)
        : w(w_), x(x_), y(y_), z(z_) {}
    /// Real quaternion.
    constexpr explicit Quaternion(double r) : w(r) {}

    static constexpr Quaternion unit_i() { return {0, 1, 0, 0}; }
    static constexpr Quaternion unit_j() { return {0, 0, 1, 0}; }
    static constexpr Quaternion unit_k() { return {0, 0, 0, 1}; }

    constexpr double re() const { return w; }
    constexpr Quaternion im() const { return {0, x, y, z}; }
    double im_norm() const { return std::sqrt(x * x + y * y + z * z); }

    constexpr Quaternion conj() const { return {w, -x, -y, -z}; }
    constexpr double norm2() const { return w * w + x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm2()); }

    constexpr Quaternion operator-() const { return {-w, -x, -y, -z}; }
    constexpr Quaternion operator+(const Quaternion& o) const {
        return {w + o.w, x + o.x, y + o.y, z + o.z};
    }
    constexpr Quaternion operator-(const Quaternion& o) const {
        return {w - o.w, x - o.x, y - o.y, z - o.z};
    }
    /// Hamilton product; noncommutative.
    constexpr Quaternion operator*(const Quaternion& o) const {
        return {w * o.w - x * o.x - y * o.y - z * o.z,
                w * o.x + x * o.w + y * o.z - z * o.y,
                w * o.y - x * o.z + y * o.w + z * o.x,
                w * o.z + x * o.y - y * o.x + z * o.w};
    }
    constexpr Quaternion operator*(double s) const { return {w * s, x * s, y * s, z * s}; }
    constexpr Quaternion operator/(double s) const { return {w / s, x / s, y / s, z / s}; }
    friend constexpr Quaternion operator*(double s, const Quaternion& q) { return q * s; }

    Quaternion inverse() const {
        double n2 = norm2();
        if (n2 == 0.0) throw std::domain_error("Quaternion::inverse: zero quaternion");
        return conj() / n2;
    }

    /// q^n by repeated multiplication, n >= 0.
    Quaternion pow(int n) const {
        if (n < 0) throw std::domain_error("Quaternion::pow: negative exponent");
        Quaternion acc(1.0);
        for (int k = 0; k < n; ++k) acc = acc * *this;
        return acc;
    }

    bool is_zero(double tol = 0.0) const {
        return std::abs(w) <= tol && std::abs(x) <= tol && std::abs(y) <= tol &&
               std::abs(z) <= tol;
    }
    bool approx_equal(const Quaternion& o, double tol) const {
        return (*this - o).norm() <= tol;
    }

    /// The complex pair (a, b) with q = a + b j, a and b in the slice C_i.
    std::pair<std::complex<double>, std::complex<double>> complex_parts() const {
        return {{w, x}, {y, z}};
    }
    static Quaternion from_complex_parts(std::complex<double> a, std::complex<double> b) {
        return {a.real(), a.imag(), b.real(), b.imag()};
    }
};

/// A unit purely-imaginary quaternion (an element of the sphere of imaginary units).
class ImaginaryUnit {
  public:
    /// Validates Re = 0 and |.| = 1 up to tol.
    explicit ImaginaryUnit(const Quaternion& u, double tol = 1e-9) : u_(u) {
        if (std::abs(u.w) > tol || std::abs(u.norm() - 1.0) > tol)
            throw std::domain_error("ImaginaryUnit: not a unit imaginary quaternion");
        u_.w = 0.0;
    }
    static ImaginaryUnit i() { return ImaginaryUnit(Quaternion::unit_i()); }
    static ImaginaryUnit j() { return ImaginaryUnit(Quaternion::unit_j()); }
    static ImaginaryUnit k() { return ImaginaryUnit(Quaternion::unit_k()); }

    const Quaternion& value() const { return u_; }

  private:
    Quaternion u_;
};

/// The axially symmetric point class [q]: all quaternions with the given real
/// part and imaginary norm. rad == 0 encodes a real point.
struct Sphere {
    double re = 0.0;
    double rad = 0.0;

    Sphere() = default;
    Sphere(double re_, double rad_) : re(re_), rad(rad_) {
        if (rad < 0.0) throw std::domain_error("Sphere: negative radius");
    }

    bool contains(const Quaternion& q, double tol = 1e-9) const {
        return std::abs(q.re() - re) <= tol && std::abs(q.im_norm() - rad) <= tol;
    }
    /// Absolute tolerance on both coordinates (default 1e-9; spheres come out
    /// of floating eigen solvers).
    bool approx_equal(const Sphere& o, double tol = 1e-9) const {
        return std::abs(re - o.re) <= tol && std::abs(rad - o.rad) <= tol;
    }
    /// The canonical representative re + i rad.
    Quaternion representative() const { return {re, rad, 0, 0}; }
};

struct SliceDecomposition {
    double re;
    double im_norm;
    ImaginaryUnit axis;
};

/// q = re + axis * im_norm with im_norm >= 0. Real quaternions get axis i.
inline SliceDecomposition slice_decompose(const Quaternion& q) {
    double n = q.im_norm();
    if (n == 0.0) return {q.re(), 0.0, ImaginaryUnit::i()};
    return {q.re(), n, ImaginaryUnit(q.im() / n, 1e-6)};
}

inline Sphere sphere_of(const Quaternion& q) { return Sphere(q.re(), q.im_norm()); }

/// count quasi-uniform members of s. The two C_i representatives re +/- i rad
/// always come first (a single one for count == 1).
inline std::vector<Quaternion> sample_sphere(const Sphere& s, int count) {
    if (count < 1) throw std::domain_error("sample_sphere: count must be >= 1");
    std::vector<Quaternion> out;
    out.reserve(static_cast<size_t>(count));
    out.push_back({s.re, s.rad, 0, 0});
    if (count == 1) return out;
    out.push_back({s.re, -s.rad, 0, 0});
    // Fibonacci spiral for the remaining axes.
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    for (int k = 2; k < count; ++k) {
        double t = (k - 1.5) / (count - 2.0 + 1e-12);
        double ct = 1.0 - 2.0 * t;
        double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        double phi = 2.0 * M_PI * (k / golden - std::floor(k / golden));
        Quaternion axis{0, st * std::cos(phi), st * std::sin(phi), ct};
        out.push_back(Quaternion(s.re) + axis * s.rad);
    }
    return out;
}

inline void to_json(nlohmann::json& j, const Quaternion& q) {
    j = nlohmann::json::array({q.w, q.x, q.y, q.z});
}
inline void from_json(const nlohmann::json& j, Quaternion& q) {
    if (!j.is_array() || j.size() != 4)
        throw std::invalid_argument("Quaternion JSON must be [w,x,y,z]");
    q = Quaternion(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                   j[3].get<double>());
}
inline void to_json(nlohmann::json& j, const Sphere& s) {
    j = nlohmann::json{{"re", s.re}, {"rad", s.rad}};
}
inline void from_json(const nlohmann::json& j, Sphere& s) {
    s = Sphere(j.at("re").get<double>(), j.at("rad").get<double>());
}

}  // namespace sspec
