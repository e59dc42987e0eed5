#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sspec/quaternion.hpp"

namespace sspec {

/// Square matrix with quaternion entries. The two-sided scalar actions are
/// entrywise: (qA)_{ij} = q a_{ij}, (Aq)_{ij} = a_{ij} q.
class QMatrix {
  public:
    QMatrix() = default;
    explicit QMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n) {
        if (n < 1) throw std::domain_error("QMatrix: n must be >= 1");
    }

    static QMatrix identity(int n) {
        QMatrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = Quaternion(1.0);
        return m;
    }
    static QMatrix zero(int n) { return QMatrix(n); }
    static QMatrix diag(const std::vector<Quaternion>& d) {
        QMatrix m(static_cast<int>(d.size()));
        for (int i = 0; i < m.n(); ++i) m(i, i) = d[static_cast<size_t>(i)];
        return m;
    }

    int n() const { return n_; }
    Quaternion& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
    const Quaternion& operator()(int i, int j) const {
        return a_[static_cast<size_t>(i) * n_ + j];
    }

    QMatrix operator+(const QMatrix& o) const {
        check_same(o);
        QMatrix r(n_);
        for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] + o.a_[k];
        return r;
    }
    QMatrix operator-(const QMatrix& o) const {
        check_same(o);
        QMatrix r(n_);
        for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] - o.a_[k];
        return r;
    }
    QMatrix operator-() const {
        QMatrix r(n_);
        for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = -a_[k];
        return r;
    }
    QMatrix operator*(const QMatrix& o) const {
        check_same(o);
        QMatrix r(n_);
        for (int i = 0; i < n_; ++i)
            for (int k = 0; k < n_; ++k) {
                const Quaternion& aik = (*this)(i, k);
                if (aik.is_zero()) continue;
                for (int j = 0; j < n_; ++j) r(i, j) = r(i, j) + aik * o(k, j);
            }
        return r;
    }
    QMatrix left_scalar(const Quaternion& q) const {
        QMatrix r(n_);
        for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = q * a_[k];
        return r;
    }
    QMatrix right_scalar(const Quaternion& q) const {
        QMatrix r(n_);
        for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] * q;
        return r;
    }
    QMatrix scale(double s) const {
        QMatrix r(n_);
        for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] * s;
        return r;
    }
    /// Conjugate transpose.
    QMatrix adjoint() const {
        QMatrix r(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) r(i, j) = (*this)(j, i).conj();
        return r;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& q : a_) m = std::max(m, q.norm());
        return m;
    }

  private:
    void check_same(const QMatrix& o) const {
        if (n_ != o.n_) throw std::invalid_argument("QMatrix: size mismatch");
    }
    int n_ = 0;
    std::vector<Quaternion> a_;
};

/// The 2n x 2n complex embedding chi(A) = [[A1, A2], [-conj(A2), conj(A1)]]
/// where A = A1 + A2 j entrywise. Multiplicative, unital, and
/// invertibility-faithful; eigenvalues come in conjugate pairs.
Eigen::MatrixXcd complex_adjoint(const QMatrix& A);

/// Inverse embedding: extracts A from a matrix with the chi block structure.
QMatrix from_complex_adjoint(const Eigen::MatrixXcd& M);

struct InvertibilityWitness {
    bool invertible;
    double sigma_min;
};

/// Default scale-relative threshold 1e-9 * max(1, ||A||).
double default_invertibility_tol(const QMatrix& A);

/// True iff the smallest singular value of chi(A) exceeds tol.
InvertibilityWitness is_invertible(const QMatrix& A, double tol);
InvertibilityWitness is_invertible(const QMatrix& A);

/// Operator norm: largest singular value of chi(A).
double op_norm(const QMatrix& A);

/// Throws std::domain_error when A is numerically singular.
QMatrix inverse(const QMatrix& A);

/// The spherical characteristic element A^2 - 2 Re(q) A + |q|^2 I. Depends on
/// q only through its sphere.
QMatrix char_elem(const QMatrix& A, const Quaternion& q);

/// The S-spectrum as a deduplicated, sorted list of spheres: eigenvalues of
/// chi(A) with Im >= 0, each self-verified by direct singularity of the
/// characteristic element at sampled sphere members.
std::vector<Sphere> s_spectrum_exact(const QMatrix& A, double dedup_tol = 1e-9);

struct GridSpec {
    double u0 = -2.0;
    double u1 = 2.0;
    double r1 = 2.0;
    double step = 0.05;

    int nu() const { return static_cast<int>(std::floor((u1 - u0) / step + 0.5)) + 1; }
    int nr() const { return static_cast<int>(std::floor(r1 / step + 0.5)) + 1; }
    double u(int iu) const { return u0 + iu * step; }
    double r(int ir) const { return ir * step; }
    void validate() const {
        if (step <= 0 || u1 < u0 || r1 < 0) throw std::domain_error("GridSpec: invalid grid");
    }
};

struct ScanResult {
    GridSpec grid;
    std::vector<double> sigma_min;  // row-major over (iu, ir)

    double at(int iu, int ir) const {
        return sigma_min[static_cast<size_t>(iu) * grid.nr() + ir];
    }
};

/// Brute-force oracle: sigma_min of chi(char_elem(A, u + i r)) over the
/// (Re q, |Im q|) half-plane grid. Zero crossings locate the S-spectrum.
ScanResult s_spectrum_scan(const QMatrix& A, const GridSpec& grid);

void to_json(nlohmann::json& j, const QMatrix& m);
void from_json(const nlohmann::json& j, QMatrix& m);

}  // namespace sspec
