#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sspec/shiftlab.hpp"
#include "test_support.hpp"

using namespace sspec;

namespace {

using Seq = std::map<int, Quaternion>;

Seq basis(int k) { return {{k, Quaternion(1.0)}}; }

double seq_dist(const Seq& a, const Seq& b) {
    double d2 = 0.0;
    for (const auto& [i, v] : a) {
        Quaternion r = v;
        auto it = b.find(i);
        if (it != b.end()) r = r - it->second;
        d2 += r.norm2();
    }
    for (const auto& [i, v] : b)
        if (a.find(i) == a.end()) d2 += v.norm2();
    return std::sqrt(d2);
}

Seq random_seq(std::mt19937_64& rng, int lo, int hi) {
    Seq x;
    for (int i = lo; i <= hi; ++i) x[i] = random_quaternion(rng);
    return x;
}

}  // namespace

TEST_CASE("action of the right shift and its rank-one complement") {
    ShiftOp R = ShiftOp::right_shift_R(), T = ShiftOp::rank_one_T();
    CHECK(seq_dist(R.apply(basis(1)), basis(0)) == 0.0);
    CHECK(R.apply(basis(0)).empty());
    CHECK(seq_dist(T.apply(basis(0)), {{-1, Quaternion(1.0)}}) == 0.0);

    // R + T is exactly the bilateral shift
    auto rng = testsup::rng_for(1);
    Seq x = random_seq(rng, -4, 4);
    Seq shifted;
    for (const auto& [i, v] : x) shifted[i - 1] = v;
    CHECK(seq_dist((R + T).apply(x), shifted) < 1e-15);
    CHECK((R + T - ShiftOp::bilateral_shift()).is_zero());
}

TEST_CASE("left scalars commute with the shift on the canonical basis") {
    auto rng = testsup::rng_for(2);
    ShiftOp V = ShiftOp::bilateral_shift();
    for (int t = 0; t < 20; ++t) {
        Quaternion q = random_quaternion(rng);
        CHECK((V.left_scalar(q) - V.right_scalar(q)).is_zero(0.0));
        // but left and right scalar actions differ on generic elements
        ShiftOp W = V.left_scalar(Quaternion::unit_i());
        CHECK(!(W.left_scalar(Quaternion::unit_j()) - W.right_scalar(Quaternion::unit_j()))
                   .is_zero(1e-12));
        break;
    }
}

TEST_CASE("operator algebra closure and adjoints") {
    auto rng = testsup::rng_for(3);
    for (int t = 0; t < 20; ++t) {
        ShiftOp::FinMap f1, f2;
        for (int k = 0; k < 3; ++k) {
            f1[{static_cast<int>(rng() % 7) - 3, static_cast<int>(rng() % 7) - 3}] =
                random_quaternion(rng);
            f2[{static_cast<int>(rng() % 7) - 3, static_cast<int>(rng() % 7) - 3}] =
                random_quaternion(rng);
        }
        int m1 = static_cast<int>(rng() % 5) - 2, m2 = static_cast<int>(rng() % 5) - 2;
        ShiftOp a(random_quaternion(rng), m1, f1);
        ShiftOp b(random_quaternion(rng), m2, f2);
        ShiftOp ab = a * b;

        // structural closure: powers add, support windows stay bounded
        for (const auto& [m, c] : ab.laurent()) CHECK(m == m1 + m2);
        CHECK(ab.support_radius() <=
              a.support_radius() + b.support_radius() + std::abs(m1) + std::abs(m2));

        // the product acts like the composition
        Seq x = random_seq(rng, -3, 3);
        CHECK(seq_dist(ab.apply(x), a.apply(b.apply(x))) < 1e-12);

        // adjoint coherence on windowed compressions (interior of the window)
        int N = ab.support_radius() + 8;
        QMatrix W = window_matrix(a, N);
        QMatrix Wadj = window_matrix(a.adjoint(), N);
        CHECK(op_norm(Wadj - W.adjoint()) < 1e-12);
    }
}

TEST_CASE("unilateral compression composes with the support projection") {
    ShiftOp Su = ShiftOp::unilateral_shift();
    // Su* Su = I and Su Su* = I - e_0 <e_0, .>
    CHECK((Su.adjoint() * Su - ShiftOp::identity(true)).is_zero(0.0));
    ShiftOp d = Su * Su.adjoint() - ShiftOp::identity(true);
    REQUIRE(d.laurent().empty());
    REQUIRE(d.fin().size() == 1);
    CHECK(d.fin().begin()->first == std::pair<int, int>(0, 0));
    CHECK(d.fin().begin()->second.approx_equal(Quaternion(-1.0), 0));

    // product rule cross-checked against direct application
    auto rng = testsup::rng_for(4);
    for (int t = 0; t < 20; ++t) {
        ShiftOp::FinMap f;
        f[{static_cast<int>(rng() % 4), static_cast<int>(rng() % 4)}] = random_quaternion(rng);
        ShiftOp a(random_quaternion(rng), static_cast<int>(rng() % 5) - 2, f, true);
        ShiftOp b(random_quaternion(rng), static_cast<int>(rng() % 5) - 2, {}, true);
        Seq x = random_seq(rng, 0, 5);
        CHECK(seq_dist((a * b).apply(x), a.apply(b.apply(x))) < 1e-12);
        CHECK(seq_dist((b * a).apply(x), b.apply(a.apply(x))) < 1e-12);
    }

    CHECK_THROWS_AS(ShiftOp(Quaternion(1.0), 0, {{{-1, 0}, Quaternion(1.0)}}, true),
                    std::invalid_argument);
}

TEST_CASE("windowed norm estimates") {
    CHECK(op_norm_estimate(ShiftOp::right_shift_R(), 10).value ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(op_norm_estimate(ShiftOp(Quaternion(0.0), 0), 5).value == 0.0);
    CHECK(op_norm_estimate(ShiftOp::unilateral_shift(), 10).value ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(op_norm_estimate(ShiftOp(Quaternion(1.0), 8), 5), std::domain_error);
    NormEstimate e = op_norm_estimate(ShiftOp::bilateral_shift().scale(2.5), 8);
    CHECK(e.converged);
    CHECK(e.value == doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("exact indices of the curated operators") {
    IndexResult r = index_of(ShiftOp::right_shift_R());
    CHECK(r.dim_ker == 1);
    CHECK(r.dim_coker == 1);
    CHECK(r.index == 0);
    CHECK(r.stable);

    IndexResult v = index_of(ShiftOp::bilateral_shift());
    CHECK(v.dim_ker == 0);
    CHECK(v.dim_coker == 0);

    IndexResult rt = index_of(ShiftOp::right_shift_R() + ShiftOp::rank_one_T());
    CHECK(rt.dim_ker == 0);
    CHECK(rt.dim_coker == 0);

    ShiftOp Su = ShiftOp::unilateral_shift();
    CHECK(index_of(Su).index == -1);
    CHECK(index_of(Su * Su).index == -2);
    CHECK(index_of(Su.adjoint()).index == 1);

    CHECK_THROWS_AS(index_of(ShiftOp::rank_one_T()), NotFredholmError);
    CHECK_THROWS_AS(index_of(Su.char_elem(Quaternion{0, 0.5, 0, 0})), std::invalid_argument);
}

TEST_CASE("adjoint flips the index across the curated family") {
    std::vector<ShiftOp> fam{ShiftOp::right_shift_R(), ShiftOp::bilateral_shift(),
                             ShiftOp::unilateral_shift(), ShiftOp::unilateral_shift(2)};
    for (const auto& op : fam) CHECK(index_of(op.adjoint()).index == -index_of(op).index);
}

TEST_CASE("Calkin-level decisions through the symbol") {
    ShiftOp R = ShiftOp::right_shift_R(), Su = ShiftOp::unilateral_shift();
    // q = 0: R_0(R) = R^2 is Fredholm with index 0
    CHECK(calkin_fredholm_at(R, Quaternion(0.0)));
    CHECK(calkin_index_at(R, Quaternion(0.0)) == 0);
    // q = 0: S_u^2 is Fredholm but has index -2, so it is not Weyl
    CHECK(calkin_fredholm_at(Su, Quaternion(0.0)));
    CHECK(calkin_index_at(Su, Quaternion(0.0)) == -2);
    // |q| = 1 degenerates the symbol on the circle
    CHECK(!calkin_fredholm_at(R, Quaternion::unit_i()));
    CHECK(!calkin_fredholm_at(Su, Quaternion(1.0)));
    CHECK_THROWS_AS(calkin_index_at(R, Quaternion::unit_i()), NotFredholmError);
    // interior |q| < 1: the characteristic element of R stays Fredholm (its
    // kernel and cokernel are finite-dimensional; only |q| = 1 is singular
    // modulo compacts)
    CHECK(calkin_fredholm_at(R, Quaternion{0, 0.5, 0, 0}));
    CHECK(calkin_index_at(R, Quaternion{0, 0.5, 0, 0}) == 0);
    CHECK(calkin_index_at(Su, Quaternion{0, 0.5, 0, 0}) == -2);
}

TEST_CASE("compact perturbations do not change the Calkin decisions") {
    auto rng = testsup::rng_for(5);
    std::vector<ShiftOp> base{ShiftOp::bilateral_shift(), ShiftOp::right_shift_R()};
    for (const auto& op : base) {
        ShiftOp::FinMap f;
        for (int k = 0; k < 4; ++k)
            f[{static_cast<int>(rng() % 9) - 4, static_cast<int>(rng() % 9) - 4}] =
                random_quaternion(rng, 2.0);
        ShiftOp pert = op + ShiftOp(Quaternion(0.0), 0, f);
        for (double r : {0.0, 0.5, 0.99, 1.0, 1.5}) {
            Quaternion q{0, r, 0, 0};
            CHECK(calkin_fredholm_at(op, q) == calkin_fredholm_at(pert, q));
        }
    }
}

TEST_CASE("Fredholm/Weyl grid classification of the shifts") {
    GridSpec g{0.0, 1.5, 1.5, 0.25};
    auto rpts = weyl_s_spectrum_shift(ShiftOp::right_shift_R(), g);
    auto supts = weyl_s_spectrum_shift(ShiftOp::unilateral_shift(), g);
    auto at = [&](const std::vector<ShiftSpectrumPoint>& v, double u,
                  double r) -> const ShiftSpectrumPoint& {
        for (const auto& p : v)
            if (std::abs(p.u - u) < 1e-12 && std::abs(p.r - r) < 1e-12) return p;
        throw std::logic_error("grid point missing");
    };
    // 0 is outside the Weyl S-spectrum of the bilateral R...
    CHECK(!at(rpts, 0, 0).in_weyl);
    CHECK(!at(rpts, 0, 0).in_fredholm);
    // ...but inside for S_u, where it is not in the Fredholm S-spectrum
    CHECK(at(supts, 0, 0).in_weyl);
    CHECK(!at(supts, 0, 0).in_fredholm);
    CHECK(at(supts, 0, 0).index == -2);
    // the unit sphere is singular for both
    CHECK(at(rpts, 0, 1).in_fredholm);
    CHECK(at(supts, 1, 0).in_fredholm);
    // far outside the norm ball everything is resolvent
    CHECK(!at(rpts, 1.5, 1.5).in_weyl);
    CHECK(!at(supts, 1.5, 1.5).in_weyl);

    // bilateral V: Fredholm region connected, Fredholm and Weyl spectra agree
    auto vpts = weyl_s_spectrum_shift(ShiftOp::bilateral_shift(), g);
    for (const auto& p : vpts) CHECK(p.in_fredholm == p.in_weyl);
    // while S_u separates them on the whole open unit ball
    CHECK(at(supts, 0.5, 0.5).in_weyl);
    CHECK(!at(supts, 0.5, 0.5).in_fredholm);
}

TEST_CASE("approximate S-spectrum residuals") {
    ShiftOp R = ShiftOp::right_shift_R();
    Quaternion qin{0, 0.5, 0, 0};
    double r10 = approx_s_spectrum_residual(R, qin, 10);
    double r40 = approx_s_spectrum_residual(R, qin, 40);
    // geometric decay from the explicit eigenvector x_{i+1} = x_i q
    CHECK(r40 < r10 * std::pow(0.5, 25));
    CHECK(approx_s_spectrum_residual(R, Quaternion(2.0), 25) > 0.5);
    CHECK(approx_s_spectrum_residual(ShiftOp(Quaternion(0.0), 0), Quaternion(1.0), 10) ==
          doctest::Approx(1.0));

    // samples inside the closed unit ball decay; outside they stay bounded away
    auto rng = testsup::rng_for(1);
    for (int t = 0; t < 6; ++t) {
        Quaternion inside = random_unit_quaternion(rng) * 0.8;
        Quaternion outside = random_unit_quaternion(rng) * 1.4;
        CHECK(approx_s_spectrum_residual(R, inside, 60) <
              0.05 * approx_s_spectrum_residual(R, inside, 10) + 1e-12);
        CHECK(approx_s_spectrum_residual(R, outside, 40) > 0.05);
    }
}

TEST_CASE("boundary witness for the right shift") {
    Quaternion q(0.5);
    BoundaryWitness w5 = boundary_witness_R(q, 5);
    CHECK(w5.bound == doctest::Approx(2.0 / 32 + 1.0 / 1024));
    CHECK(w5.distance <= w5.bound + 1e-12);
    CHECK(w5.inverse_error < 1e-9);

    double prev = 1e300;
    for (int n = 1; n <= 10; ++n) {
        BoundaryWitness w = boundary_witness_R(q, n, 100, 7);
        CHECK(w.distance <= w.bound + 1e-12);
        CHECK(w.inverse_error < 1e-9);
        CHECK(w.distance < prev);  // monotone decay toward R^2
        prev = w.distance;
    }
    CHECK_THROWS_AS(boundary_witness_R(Quaternion(1.0), 3), std::domain_error);
    CHECK_THROWS_AS(boundary_witness_R(Quaternion(0.0), 3), std::domain_error);
}

TEST_CASE("twisted square inverse formula") {
    auto rng = testsup::rng_for(2);
    for (int t = 0; t < 100; ++t) {
        Quaternion p = random_quaternion(rng);
        if (p.norm() < 0.05 || p.norm() > 0.95) continue;
        ShiftOp Rp = ShiftOp::right_shift_R() + ShiftOp::rank_one_T().right_scalar(p);
        ShiftOp Rp2 = Rp * Rp;
        Seq y = random_seq(rng, -6, 6);
        Seq x = twisted_square_inverse(p, y);
        CHECK(seq_dist(Rp2.apply(x), y) < 1e-12);
    }
    CHECK_THROWS_AS(twisted_square_inverse(Quaternion(0.0), basis(0)), std::domain_error);
}

TEST_CASE("index constancy along Fredholm paths") {
    ShiftOp Su = ShiftOp::unilateral_shift(), V = ShiftOp::bilateral_shift();
    std::vector<Quaternion> outer, inner;
    for (double u = 2.0; u >= 1.2; u -= 0.1) outer.push_back(Quaternion(u));
    for (double r = 0.1; r <= 0.9; r += 0.1) inner.push_back(Quaternion{0.0, r, 0, 0});

    PathReport p1 = index_constancy_probe(Su, outer);
    CHECK(p1.constant);
    CHECK(p1.indices.front() == 0);
    PathReport p2 = index_constancy_probe(Su, inner);
    CHECK(p2.constant);
    CHECK(p2.indices.front() == -2);
    PathReport p3 = index_constancy_probe(V, outer);
    CHECK(p3.constant);
    CHECK(p3.indices.front() == 0);

    std::vector<Quaternion> bad{Quaternion(2.0), Quaternion(1.0)};
    CHECK_THROWS_AS(index_constancy_probe(Su, bad), NotFredholmError);
}

TEST_CASE("random Fredholm paths keep a constant index") {
    for (unsigned seed = 1; seed <= 5; ++seed) {
        auto rng = testsup::rng_for(seed);
        for (int t = 0; t < 2; ++t) {
            bool inside = rng() % 2;
            ShiftOp op = (rng() % 2) ? ShiftOp::unilateral_shift() : ShiftOp::right_shift_R();
            double r0 = inside ? 0.2 : 1.3, r1 = inside ? 0.9 : 2.5;
            Quaternion dir = random_unit_quaternion(rng);
            std::vector<Quaternion> path;
            for (int k = 0; k <= 10; ++k)
                path.push_back(dir * (r0 + (r1 - r0) * k / 10.0));
            CHECK(index_constancy_probe(op, path).constant);
        }
    }
}

TEST_CASE("operator JSON round trips") {
    ShiftOp::FinMap f;
    f[{-1, 0}] = Quaternion{0, 0, 0, -2};
    ShiftOp op(Quaternion{1, 2, 3, 4}, -1, f);
    ShiftOp back = shift_op_from_json(shift_op_to_json(op));
    CHECK((op - back).is_zero(0.0));

    // single-power input form
    auto j = nlohmann::json::parse(
        R"({"coeff":[1,0,0,0],"power":1,"fin":[{"i":-1,"j":0,"q":[-1,0,0,0]}]})");
    CHECK((shift_op_from_json(j) - ShiftOp::right_shift_R()).is_zero(0.0));

    ShiftOp multi = ShiftOp::unilateral_shift().char_elem(Quaternion{0, 0.5, 0, 0});
    CHECK((shift_op_from_json(shift_op_to_json(multi)) - multi).is_zero(0.0));
}
