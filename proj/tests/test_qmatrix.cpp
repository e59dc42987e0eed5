#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sspec/qmatrix.hpp"
#include "test_support.hpp"

using namespace sspec;

namespace {

QMatrix example_A() {
    return QMatrix::diag({Quaternion::unit_i(), Quaternion::unit_j()});
}

// 3x3 anti-diagonal matrix with entries i, j, k.
QMatrix example_B() {
    QMatrix B(3);
    B(0, 2) = Quaternion::unit_i();
    B(1, 1) = Quaternion::unit_j();
    B(2, 0) = Quaternion::unit_k();
    return B;
}

}  // namespace

TEST_CASE("complex adjoint is a unital *-homomorphism") {
    auto rng = testsup::rng_for(1);
    CHECK(complex_adjoint(QMatrix::identity(3)).isApprox(Eigen::MatrixXcd::Identity(6, 6)));
    for (int t = 0; t < 100; ++t) {
        QMatrix A = random_qmatrix(rng, 3), B = random_qmatrix(rng, 3);
        CHECK((complex_adjoint(A) * complex_adjoint(B) - complex_adjoint(A * B))
                  .cwiseAbs()
                  .maxCoeff() < 1e-10);
        CHECK((complex_adjoint(A.adjoint()) - complex_adjoint(A).adjoint())
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
        CHECK(from_complex_adjoint(complex_adjoint(A)).max_abs() ==
              doctest::Approx(A.max_abs()).epsilon(1e-12));
        // scalar actions for q in the slice C_i match complex scalar blocks
        Quaternion q{0.7, -0.3, 0, 0};
        auto [qa, qb] = q.complex_parts();
        (void)qb;
        Eigen::MatrixXcd chiA = complex_adjoint(A);
        int n = A.n();
        Eigen::MatrixXcd scaled = chiA;
        scaled.topRows(n) *= qa;
        scaled.bottomRows(n) *= std::conj(qa);
        CHECK((complex_adjoint(A.left_scalar(q)) - scaled).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("invertibility through chi") {
    auto rng = testsup::rng_for(2);
    for (int t = 0; t < 30; ++t) {
        QMatrix A = random_qmatrix(rng, 3);
        QMatrix S = A;
        for (int j = 0; j < 3; ++j) S(1, j) = S(0, j);  // repeated row => singular
        CHECK(is_invertible(A, default_invertibility_tol(A)).invertible);
        CHECK(!is_invertible(S, default_invertibility_tol(S)).invertible);
        QMatrix inv = inverse(A);
        CHECK(op_norm(A * inv - QMatrix::identity(3)) < 1e-10);
        CHECK(op_norm(inv * A - QMatrix::identity(3)) < 1e-10);
        CHECK_THROWS_AS(inverse(S), std::domain_error);
    }
}

TEST_CASE("operator norm") {
    CHECK(op_norm(QMatrix::identity(4)) == doctest::Approx(1.0));
    QMatrix D = QMatrix::diag({Quaternion::unit_i() * 2.0, Quaternion::unit_j()});
    CHECK(op_norm(D) == doctest::Approx(2.0));
    auto rng = testsup::rng_for(3);
    for (int t = 0; t < 100; ++t) {
        QMatrix A = random_qmatrix(rng, 3), B = random_qmatrix(rng, 3);
        CHECK(op_norm(A * B) <= op_norm(A) * op_norm(B) + 1e-10);
    }
}

TEST_CASE("characteristic element") {
    QMatrix A = example_A();
    // q = i: A^2 + I = 0 since A^2 = -I
    CHECK(op_norm(char_elem(A, Quaternion::unit_i())) < 1e-15);
    Quaternion q{1.5, 2, 0.5, -1};
    CHECK(op_norm(char_elem(QMatrix::zero(2), q) - QMatrix::identity(2).scale(q.norm2())) <
          1e-15);
    // depends on q only through its sphere
    auto members = sample_sphere(sphere_of(q), 6);
    for (const auto& p : members)
        CHECK(op_norm(char_elem(A, p) - char_elem(A, q)) < 1e-12);
}

TEST_CASE("exact S-spectrum: canonical examples") {
    auto sA = s_spectrum_exact(example_A());
    REQUIRE(sA.size() == 1);
    CHECK(sA[0].approx_equal(Sphere(0, 1), 1e-9));

    auto sB = s_spectrum_exact(example_B());
    REQUIRE(sB.size() == 3);
    double h = std::sqrt(0.5);
    CHECK(sB[0].approx_equal(Sphere(-h, h), 1e-7));
    CHECK(sB[1].approx_equal(Sphere(0, 1), 1e-7));
    CHECK(sB[2].approx_equal(Sphere(h, h), 1e-7));

    auto sZ = s_spectrum_exact(QMatrix::zero(2));
    REQUIRE(sZ.size() == 1);
    CHECK(sZ[0].approx_equal(Sphere(0, 0), 1e-12));
}

TEST_CASE("scan oracle") {
    GridSpec g{-1.0, 1.0, 1.0, 0.25};
    ScanResult scan = s_spectrum_scan(QMatrix::zero(2), g);
    for (int iu = 0; iu < g.nu(); ++iu)
        for (int ir = 0; ir < g.nr(); ++ir)
            CHECK(scan.at(iu, ir) ==
                  doctest::Approx(g.u(iu) * g.u(iu) + g.r(ir) * g.r(ir)).epsilon(1e-12));

    // example A: the minimum over the grid sits at (0, 1)
    ScanResult sa = s_spectrum_scan(example_A(), g);
    double best = 1e300;
    int bu = -1, br = -1;
    for (int iu = 0; iu < g.nu(); ++iu)
        for (int ir = 0; ir < g.nr(); ++ir)
            if (sa.at(iu, ir) < best) {
                best = sa.at(iu, ir);
                bu = iu;
                br = ir;
            }
    CHECK(g.u(bu) == doctest::Approx(0.0));
    CHECK(g.r(br) == doctest::Approx(1.0));
    CHECK(best < 1e-6);

    GridSpec bad{0, 1, 1, -0.1};
    CHECK_THROWS_AS(bad.validate(), std::domain_error);
}

TEST_CASE("scan agrees with the exact spectrum on random matrices") {
    auto rng = testsup::rng_for(4);
    for (int t = 0; t < 50; ++t) {
        QMatrix A = random_qmatrix(rng, 3);
        double scale = std::max(1.0, op_norm(A));
        for (const auto& s : s_spectrum_exact(A)) {
            // sigma_min vanishes at the sphere itself...
            QMatrix R = char_elem(A, s.representative());
            CHECK(is_invertible(R, default_invertibility_tol(R)).sigma_min <
                  1e-6 * scale * scale);
        }
        // ...and stays visibly positive at random off-spectrum spheres
        auto spheres = s_spectrum_exact(A);
        int checked = 0;
        while (checked < 5) {
            Sphere probe(std::uniform_real_distribution<double>(-2, 2)(rng) * scale,
                         std::uniform_real_distribution<double>(0, 2)(rng) * scale);
            double dmin = 1e300;
            for (const auto& s : spheres)
                dmin = std::min(dmin, std::hypot(probe.re - s.re, probe.rad - s.rad));
            if (dmin < 0.1 * scale) continue;
            QMatrix R = char_elem(A, probe.representative());
            CHECK(is_invertible(R, 1e-12).sigma_min > 1e-3);
            ++checked;
        }
    }
}

TEST_CASE("axial symmetry of invertibility decisions") {
    auto rng = testsup::rng_for(5);
    for (int t = 0; t < 20; ++t) {
        QMatrix A = random_qmatrix(rng, 3);
        Quaternion q = random_quaternion(rng, 2.0);
        QMatrix R0 = char_elem(A, q);
        bool ref = is_invertible(R0, default_invertibility_tol(R0)).invertible;
        for (const auto& p : sample_sphere(sphere_of(q), 8)) {
            QMatrix R = char_elem(A, p);
            CHECK(is_invertible(R, default_invertibility_tol(R)).invertible == ref);
        }
    }
}

TEST_CASE("spectrum lies in the norm ball") {
    auto rng = testsup::rng_for(1);
    for (int t = 0; t < 50; ++t) {
        QMatrix A = random_qmatrix(rng, 3);
        double nrm = op_norm(A);
        for (const auto& s : s_spectrum_exact(A))
            CHECK(std::hypot(s.re, s.rad) <= nrm + 1e-9);
    }
}

TEST_CASE("spectrum is invariant under unitary similarity") {
    auto rng = testsup::rng_for(2);
    for (int t = 0; t < 25; ++t) {
        QMatrix A = random_qmatrix(rng, 3);
        QMatrix U = random_unitary(rng, 3);
        CHECK(op_norm(U.adjoint() * U - QMatrix::identity(3)) < 1e-10);
        auto s1 = s_spectrum_exact(A);
        auto s2 = s_spectrum_exact(U.adjoint() * A * U);
        CHECK(testsup::same_sphere_sets(s1, s2, 1e-8));
    }
}

TEST_CASE("matrix JSON round trip") {
    auto rng = testsup::rng_for(3);
    QMatrix A = random_qmatrix(rng, 3);
    nlohmann::json j = A;
    CHECK(j.at("n") == 3);
    QMatrix back = j.get<QMatrix>();
    CHECK(op_norm(A - back) == 0.0);
    CHECK_THROWS(nlohmann::json::parse("{\"n\":2,\"entries\":[[[0,0,0,0]]]}").get<QMatrix>());
}
