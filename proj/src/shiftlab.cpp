#include "sspec/shiftlab.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <random>

namespace sspec {

// ---------------------------------------------------------------------------
// ShiftOp algebra

ShiftOp::ShiftOp(const Quaternion& coeff, int power, FinMap fin, bool unilateral)
    : fin_(std::move(fin)), unilateral_(unilateral) {
    if (!coeff.is_zero()) laurent_[power] = coeff;
    if (unilateral_)
        for (const auto& [ij, q] : fin_)
            if (ij.first < 0 || ij.second < 0)
                throw std::invalid_argument(
                    "ShiftOp: unilateral finite-rank indices must be >= 0");
    prune();
}

ShiftOp ShiftOp::right_shift_R() {
    FinMap f;
    f[{-1, 0}] = Quaternion(-1.0);
    return ShiftOp(Quaternion(1.0), 1, std::move(f));
}

ShiftOp ShiftOp::rank_one_T() {
    FinMap f;
    f[{-1, 0}] = Quaternion(1.0);
    return ShiftOp(Quaternion(0.0), 0, std::move(f));
}

ShiftOp ShiftOp::unilateral_shift(int p) {
    if (p < 1) throw std::domain_error("unilateral_shift: p must be >= 1");
    return ShiftOp(Quaternion(1.0), -p, {}, true);
}

void ShiftOp::prune() {
    for (auto it = laurent_.begin(); it != laurent_.end();)
        it = it->second.is_zero() ? laurent_.erase(it) : std::next(it);
    for (auto it = fin_.begin(); it != fin_.end();)
        it = it->second.is_zero() ? fin_.erase(it) : std::next(it);
}

int ShiftOp::support_radius() const {
    int w = 0;
    for (const auto& [m, c] : laurent_) w = std::max(w, std::abs(m));
    for (const auto& [ij, q] : fin_)
        w = std::max({w, std::abs(ij.first), std::abs(ij.second)});
    return w;
}

bool ShiftOp::is_zero(double tol) const {
    for (const auto& [m, c] : laurent_)
        if (!c.is_zero(tol)) return false;
    for (const auto& [ij, q] : fin_)
        if (!q.is_zero(tol)) return false;
    return true;
}

namespace {

void check_space(const ShiftOp& a, const ShiftOp& b) {
    if (a.unilateral() != b.unilateral())
        throw std::invalid_argument("ShiftOp: bilateral/unilateral mismatch");
}

}  // namespace

ShiftOp ShiftOp::operator+(const ShiftOp& o) const {
    check_space(*this, o);
    ShiftOp r = *this;
    for (const auto& [m, c] : o.laurent_) {
        auto it = r.laurent_.find(m);
        if (it == r.laurent_.end()) r.laurent_[m] = c;
        else it->second = it->second + c;
    }
    for (const auto& [ij, q] : o.fin_) {
        auto it = r.fin_.find(ij);
        if (it == r.fin_.end()) r.fin_[ij] = q;
        else it->second = it->second + q;
    }
    r.prune();
    return r;
}

ShiftOp ShiftOp::operator-() const {
    ShiftOp r = *this;
    for (auto& [m, c] : r.laurent_) c = -c;
    for (auto& [ij, q] : r.fin_) q = -q;
    return r;
}

ShiftOp ShiftOp::operator-(const ShiftOp& o) const { return *this + (-o); }

ShiftOp ShiftOp::operator*(const ShiftOp& o) const {
    check_space(*this, o);
    ShiftOp r;
    r.unilateral_ = unilateral_;

    // Laurent x Laurent: c1 V^{m1} c2 V^{m2} = (c1 c2) V^{m1+m2}.
    for (const auto& [m1, c1] : laurent_)
        for (const auto& [m2, c2] : o.laurent_) {
            auto& dst = r.laurent_[m1 + m2];
            dst = dst + c1 * c2;
        }
    // Laurent x fin: entry (i, j) = c F(i+m, j).
    for (const auto& [m, c] : laurent_)
        for (const auto& [ij, f] : o.fin_) {
            auto& dst = r.fin_[{ij.first - m, ij.second}];
            dst = dst + c * f;
        }
    // fin x Laurent: entry (i, j+m) = F(i, j) c.
    for (const auto& [ij, f] : fin_)
        for (const auto& [m, c] : o.laurent_) {
            auto& dst = r.fin_[{ij.first, ij.second + m}];
            dst = dst + f * c;
        }
    // fin x fin.
    for (const auto& [ij1, f1] : fin_)
        for (const auto& [ij2, f2] : o.fin_)
            if (ij1.second == ij2.first) {
                auto& dst = r.fin_[{ij1.first, ij2.second}];
                dst = dst + f1 * f2;
            }

    if (unilateral_) {
        // P+ A P+ B P+ = P+ (AB) P+ - P+ A (P- B P+). The middle projection
        // matters whenever B maps nonnegative support below zero.
        ShiftOp::FinMap K;  // P- B P+, rows < 0
        for (const auto& [m, c] : o.laurent_)
            if (m > 0)
                for (int i = -m; i <= -1; ++i) K[{i, i + m}] = c;
        for (const auto& [Kij, Kv] : K) {
            for (const auto& [p, a] : laurent_) {
                int row = Kij.first - p;
                if (row < 0) continue;
                auto& dst = r.fin_[{row, Kij.second}];
                dst = dst - a * Kv;
            }
            // A's finite-rank part reads only indices >= 0, where K vanishes.
        }
        for (auto it = r.fin_.begin(); it != r.fin_.end();)
            it = (it->first.first < 0 || it->first.second < 0) ? r.fin_.erase(it)
                                                               : std::next(it);
    }
    r.prune();
    return r;
}

ShiftOp ShiftOp::left_scalar(const Quaternion& q) const {
    ShiftOp r = *this;
    for (auto& [m, c] : r.laurent_) c = q * c;
    for (auto& [ij, f] : r.fin_) f = q * f;
    r.prune();
    return r;
}

ShiftOp ShiftOp::right_scalar(const Quaternion& q) const {
    ShiftOp r = *this;
    for (auto& [m, c] : r.laurent_) c = c * q;
    for (auto& [ij, f] : r.fin_) f = f * q;
    r.prune();
    return r;
}

ShiftOp ShiftOp::scale(double s) const { return left_scalar(Quaternion(s)); }

ShiftOp ShiftOp::adjoint() const {
    ShiftOp r;
    r.unilateral_ = unilateral_;
    for (const auto& [m, c] : laurent_) r.laurent_[-m] = c.conj();
    for (const auto& [ij, f] : fin_) r.fin_[{ij.second, ij.first}] = f.conj();
    r.prune();
    return r;
}

std::map<int, Quaternion> ShiftOp::apply(const std::map<int, Quaternion>& x) const {
    std::map<int, Quaternion> y;
    for (const auto& [idx, v] : x) {
        if (unilateral_ && idx < 0) continue;
        for (const auto& [m, c] : laurent_) {
            int i = idx - m;
            if (unilateral_ && i < 0) continue;
            auto& dst = y[i];
            dst = dst + c * v;
        }
        for (const auto& [ij, f] : fin_)
            if (ij.second == idx) {
                auto& dst = y[ij.first];
                dst = dst + f * v;
            }
    }
    for (auto it = y.begin(); it != y.end();)
        it = it->second.is_zero(1e-300) ? y.erase(it) : std::next(it);
    return y;
}

ShiftOp ShiftOp::char_elem(const Quaternion& q) const {
    ShiftOp r = (*this) * (*this) - scale(2.0 * q.re());
    return r + identity(unilateral_).scale(q.norm2());
}

// ---------------------------------------------------------------------------
// Windowed compressions

namespace {

Quaternion entry_at(const ShiftOp& op, int i, int j) {
    Quaternion v;
    for (const auto& [m, c] : op.laurent())
        if (j == i + m) v = v + c;
    auto it = op.fin().find({i, j});
    if (it != op.fin().end()) v = v + it->second;
    return v;
}

/// chi of the rectangular compression rows [r0, r1] x cols [c0, c1].
Eigen::MatrixXcd chi_rect(const ShiftOp& op, int r0, int r1, int c0, int c1) {
    const int R = r1 - r0 + 1, C = c1 - c0 + 1;
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(2 * R, 2 * C);
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j) {
            Quaternion q = entry_at(op, r0 + i, c0 + j);
            if (q.is_zero()) continue;
            auto [a, b] = q.complex_parts();
            M(i, j) = a;
            M(i, C + j) = b;
            M(R + i, j) = -std::conj(b);
            M(R + i, C + j) = std::conj(a);
        }
    return M;
}

Eigen::VectorXd rect_singular_values(const Eigen::MatrixXcd& M) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(M);
    return svd.singularValues();
}

/// Quaternionic nullity of a rectangular compression: (2*cols - rank)/2.
int quaternionic_nullity(const Eigen::MatrixXcd& M) {
    Eigen::VectorXd sv = rect_singular_values(M);
    double thresh = 1e-9 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
    int rank = 0;
    for (int k = 0; k < sv.size(); ++k)
        if (sv(k) > thresh) ++rank;
    int nullity = static_cast<int>(M.cols()) - rank;
    if (nullity % 2 != 0)
        throw IndexInstabilityError(
            "quaternionic_nullity: odd complex nullity signals a rank error");
    return nullity / 2;
}

}  // namespace

QMatrix window_matrix(const ShiftOp& op, int N) {
    if (N < 1) throw std::domain_error("window_matrix: N must be >= 1");
    int lo = op.unilateral() ? 0 : -N;
    QMatrix M(N - lo + 1);
    for (int i = lo; i <= N; ++i)
        for (int j = lo; j <= N; ++j) M(i - lo, j - lo) = entry_at(op, i, j);
    return M;
}

NormEstimate op_norm_estimate(const ShiftOp& op, int N) {
    int min_window = op.support_radius() + 3;
    if (N < min_window)
        throw std::domain_error("op_norm_estimate: window too small for operator support");
    double prev = -1.0;
    for (int W = N; W <= N + 60; W += 5) {
        double cur = op_norm(window_matrix(op, W));
        if (prev >= 0.0 && std::abs(cur - prev) <= 1e-9) return {cur, W, true};
        prev = cur;
    }
    return {prev, N + 60, false};
}

// ---------------------------------------------------------------------------
// Exact index for single-leading-power operators

namespace {

IndexResult bilateral_index(const Quaternion& coeff, int power, const ShiftOp::FinMap& fin,
                            int grow) {
    // op = c V^m (I + G) with G(i, j) = c^{-1} F(i - m, j): kernel and
    // cokernel agree with those of I + G, supported inside the window of G.
    Quaternion cinv = coeff.inverse();
    ShiftOp::FinMap G;
    for (const auto& [ij, f] : fin) G[{ij.first + power, ij.second}] = cinv * f;
    if (G.empty()) return {0, 0, 0, true};
    int lo = 0, hi = 0;
    for (const auto& [ij, g] : G) {
        lo = std::min({lo, ij.first, ij.second});
        hi = std::max({hi, ij.first, ij.second});
    }
    lo -= grow;
    hi += grow;
    const int n = hi - lo + 1;
    QMatrix M = QMatrix::identity(n), Madj = QMatrix::identity(n);
    for (const auto& [ij, g] : G) {
        M(ij.first - lo, ij.second - lo) = M(ij.first - lo, ij.second - lo) + g;
        Madj(ij.second - lo, ij.first - lo) =
            Madj(ij.second - lo, ij.first - lo) + g.conj();
    }
    int ker = quaternionic_nullity(complex_adjoint(M));
    int coker = quaternionic_nullity(complex_adjoint(Madj));
    return {ker, coker, ker - coker, false};
}

int unilateral_kernel_dim(const ShiftOp& op, int Nc) {
    int span = op.support_radius() + 1;
    return quaternionic_nullity(chi_rect(op, 0, Nc + span, 0, Nc));
}

}  // namespace

IndexResult index_of(const ShiftOp& op) {
    if (op.laurent().empty())
        throw NotFredholmError("index_of: finite-rank operator is not Fredholm");
    if (op.laurent().size() != 1)
        throw std::invalid_argument(
            "index_of: exact dimensions need a single leading power; use "
            "calkin_index_at for general Laurent parts");
    auto [power, coeff] = *op.laurent().begin();

    if (!op.unilateral()) {
        IndexResult a = bilateral_index(coeff, power, op.fin(), 0);
        IndexResult b = bilateral_index(coeff, power, op.fin(), 5);
        if (a.dim_ker != b.dim_ker || a.dim_coker != b.dim_coker)
            throw IndexInstabilityError("index_of: dimensions failed window stabilization");
        a.stable = true;
        return a;
    }

    int N0 = op.support_radius() + 10;
    ShiftOp adj = op.adjoint();
    IndexResult r;
    r.dim_ker = unilateral_kernel_dim(op, N0);
    r.dim_coker = unilateral_kernel_dim(adj, N0);
    if (r.dim_ker != unilateral_kernel_dim(op, N0 + 5) ||
        r.dim_coker != unilateral_kernel_dim(adj, N0 + 5))
        throw IndexInstabilityError("index_of: dimensions failed window stabilization");
    r.index = r.dim_ker - r.dim_coker;
    r.stable = true;
    return r;
}

// ---------------------------------------------------------------------------
// Calkin-level decisions through the 2x2 matrix symbol

namespace {

using Poly = std::map<int, std::complex<double>>;  // exponent -> coefficient

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly r;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) r[ea + eb] += ca * cb;
    return r;
}

Poly poly_sub(Poly a, const Poly& b) {
    for (const auto& [e, c] : b) a[e] -= c;
    return a;
}

struct SymbolAnalysis {
    bool invertible_on_circle;
    int winding;  // winding number of det(symbol) along the unit circle
};

/// det of the symbol phi(z) = sum_m chi(c_m) z^{-m} of the Laurent part,
/// analyzed on the unit circle. The finite-rank part is compact and does not
/// enter.
SymbolAnalysis analyze_symbol(const std::map<int, Quaternion>& laurent) {
    Poly p00, p01, p10, p11;
    for (const auto& [m, c] : laurent) {
        auto [a, b] = c.complex_parts();
        p00[-m] += a;
        p01[-m] += b;
        p10[-m] += -std::conj(b);
        p11[-m] += std::conj(a);
    }
    Poly det = poly_sub(poly_mul(p00, p11), poly_mul(p01, p10));

    double maxc = 0.0;
    for (const auto& [e, c] : det) maxc = std::max(maxc, std::abs(c));
    if (maxc == 0.0) return {false, 0};
    for (auto it = det.begin(); it != det.end();)
        it = (std::abs(it->second) <= 1e-12 * maxc) ? det.erase(it) : std::next(it);
    if (det.empty()) return {false, 0};

    int kmin = det.begin()->first;
    int kmax = det.rbegin()->first;
    int deg = kmax - kmin;
    if (deg == 0) return {true, kmin};

    Eigen::VectorXcd coeffs = Eigen::VectorXcd::Zero(deg + 1);
    for (const auto& [e, c] : det) coeffs(e - kmin) = c;
    auto eval = [&](std::complex<double> z) {
        std::complex<double> acc = coeffs(deg);
        for (int k = deg - 1; k >= 0; --k) acc = acc * z + coeffs(k);
        return acc;
    };

    // Invertibility on the circle and the winding number of det via the
    // argument principle: root finding is ill-conditioned at multiple circle
    // roots, while circle sampling is not. The sample count doubles until
    // every phase increment is unambiguous.
    for (int M = 1024; M <= 65536; M *= 2) {
        double minmod = std::numeric_limits<double>::infinity(), maxmod = 0.0;
        double total = 0.0;
        bool resolved = true;
        std::complex<double> prev = eval(1.0);
        for (int k = 1; k <= M; ++k) {
            double th = 2.0 * M_PI * k / M;
            std::complex<double> cur = eval(std::polar(1.0, k == M ? 0.0 : th));
            minmod = std::min({minmod, std::abs(prev), std::abs(cur)});
            maxmod = std::max(maxmod, std::abs(cur));
            double dphi = std::arg(cur / prev);
            if (std::abs(dphi) > M_PI / 2) resolved = false;
            total += dphi;
            prev = cur;
        }
        if (minmod <= 1e-10 * maxmod) return {false, 0};
        if (!resolved) continue;
        int w = static_cast<int>(std::lround(total / (2.0 * M_PI)));
        return {true, kmin + w};
    }
    return {false, 0};  // phase never resolved: zeros effectively on the circle
}

}  // namespace

bool calkin_fredholm_at(const ShiftOp& op, const Quaternion& q) {
    return analyze_symbol(op.char_elem(q).laurent()).invertible_on_circle;
}

int calkin_index_at(const ShiftOp& op, const Quaternion& q) {
    SymbolAnalysis sa = analyze_symbol(op.char_elem(q).laurent());
    if (!sa.invertible_on_circle)
        throw NotFredholmError("calkin_index_at: R_q(op) is not a Fredholm operator");
    if (!op.unilateral()) return 0;  // bilateral Laurent + compact: index 0
    int complex_index = -sa.winding;
    if (complex_index % 2 != 0)
        throw IndexInstabilityError("calkin_index_at: odd complex index");
    return complex_index / 2;
}

std::vector<ShiftSpectrumPoint> weyl_s_spectrum_shift(const ShiftOp& op,
                                                      const GridSpec& grid) {
    grid.validate();
    std::vector<ShiftSpectrumPoint> out;
    out.reserve(static_cast<size_t>(grid.nu()) * grid.nr());
    for (int iu = 0; iu < grid.nu(); ++iu)
        for (int ir = 0; ir < grid.nr(); ++ir) {
            Quaternion q{grid.u(iu), grid.r(ir), 0, 0};
            SymbolAnalysis sa = analyze_symbol(op.char_elem(q).laurent());
            bool fred = sa.invertible_on_circle;
            int idx = 0;
            if (fred && op.unilateral()) {
                if (sa.winding % 2 != 0)
                    throw IndexInstabilityError("weyl_s_spectrum_shift: odd complex index");
                idx = -sa.winding / 2;
            }
            out.push_back({grid.u(iu), grid.r(ir), !fred, !fred || idx != 0, idx});
        }
    return out;
}

double approx_s_spectrum_residual(const ShiftOp& op, const Quaternion& q, int N) {
    if (N < 1) throw std::domain_error("approx_s_spectrum_residual: N must be >= 1");
    ShiftOp Rq = op.char_elem(q);
    int span = Rq.support_radius() + 1;
    int c0 = op.unilateral() ? 0 : -N;
    int r0 = op.unilateral() ? 0 : -N - span;
    Eigen::VectorXd sv = rect_singular_values(chi_rect(Rq, r0, N + span, c0, N));
    return sv(sv.size() - 1);
}

std::map<int, Quaternion> twisted_square_inverse(const Quaternion& p,
                                                 const std::map<int, Quaternion>& y) {
    if (p.is_zero()) throw std::domain_error("twisted_square_inverse: p must be nonzero");
    Quaternion pinv = p.inverse();
    std::map<int, Quaternion> x;
    for (const auto& [i, v] : y) {
        int target = i + 2;
        x[target] = (target == 0 || target == 1) ? pinv * v : v;
    }
    return x;
}

BoundaryWitness boundary_witness_R(const Quaternion& q, int n, int test_vectors,
                                   unsigned seed) {
    double mod = q.norm();
    if (mod <= 0.0 || mod >= 1.0)
        throw std::domain_error("boundary_witness_R: requires 0 < |q| < 1");
    if (n < 1) throw std::domain_error("boundary_witness_R: n must be >= 1");

    ShiftOp R = ShiftOp::right_shift_R();
    Quaternion qn = q.pow(n);
    ShiftOp Rn = (R + ShiftOp::rank_one_T().right_scalar(qn));
    Rn = Rn * Rn;
    ShiftOp D = Rn - R * R;

    NormEstimate dist = op_norm_estimate(D, D.support_radius() + 3);
    double bound = 2.0 * std::pow(mod, n) + std::pow(mod, 2 * n);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < test_vectors; ++t) {
        std::map<int, Quaternion> y;
        for (int i = -8; i <= 8; ++i) y[i] = {u(rng), u(rng), u(rng), u(rng)};
        std::map<int, Quaternion> x = twisted_square_inverse(qn, y);
        std::map<int, Quaternion> back = Rn.apply(x);
        double err2 = 0.0;
        for (const auto& [i, v] : y) {
            Quaternion d = v;
            auto it = back.find(i);
            if (it != back.end()) d = d - it->second;
            err2 += d.norm2();
        }
        for (const auto& [i, v] : back)
            if (y.find(i) == y.end()) err2 += v.norm2();
        worst = std::max(worst, std::sqrt(err2));
    }
    return {dist.value, bound, worst};
}

PathReport index_constancy_probe(const ShiftOp& op, const std::vector<Quaternion>& path) {
    PathReport rep;
    for (const auto& q : path) {
        if (!calkin_fredholm_at(op, q))
            throw NotFredholmError("index_constancy_probe: path exits the Fredholm region at q = (" +
                                   std::to_string(q.w) + ", " + std::to_string(q.x) + ", " +
                                   std::to_string(q.y) + ", " + std::to_string(q.z) + ")");
        rep.indices.push_back(calkin_index_at(op, q));
    }
    rep.constant = true;
    for (int idx : rep.indices)
        if (idx != rep.indices.front()) rep.constant = false;
    return rep;
}

// ---------------------------------------------------------------------------
// Serialization

ShiftOp shift_op_from_json(const nlohmann::json& j) {
    bool unilateral = j.value("unilateral", false);
    ShiftOp::FinMap fin;
    if (j.contains("fin"))
        for (const auto& e : j.at("fin"))
            fin[{e.at("i").get<int>(), e.at("j").get<int>()}] = e.at("q").get<Quaternion>();
    if (j.contains("coeff"))
        return ShiftOp(j.at("coeff").get<Quaternion>(), j.value("power", 0), std::move(fin),
                       unilateral);
    ShiftOp op(Quaternion(0.0), 0, std::move(fin), unilateral);
    if (j.contains("laurent"))
        for (const auto& e : j.at("laurent"))
            op = op + ShiftOp(e.at("coeff").get<Quaternion>(), e.at("power").get<int>(), {},
                              unilateral);
    return op;
}

nlohmann::json shift_op_to_json(const ShiftOp& op) {
    nlohmann::json laur = nlohmann::json::array();
    for (const auto& [m, c] : op.laurent())
        laur.push_back({{"power", m}, {"coeff", c}});
    nlohmann::json fin = nlohmann::json::array();
    for (const auto& [ij, f] : op.fin())
        fin.push_back({{"i", ij.first}, {"j", ij.second}, {"q", f}});
    return {{"laurent", laur}, {"fin", fin}, {"unilateral", op.unilateral()}};
}

}  // namespace sspec
