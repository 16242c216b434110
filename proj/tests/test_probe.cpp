#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "miscat/probe.hpp"

using namespace miscat;

TEST_CASE("bump polynomial shape") {
    Poly g = bump_poly(4);  // u^5 (1-u)^5
    CHECK(g.degree() == 10);
    CHECK(g.eval(0.0) == 0.0);
    CHECK(g.eval(1.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(g.eval(0.5) == doctest::Approx(9.765625e-4).epsilon(1e-14));  // 2^-10
    CHECK(g.eval(0.25) == doctest::Approx(std::pow(0.25 * 0.75, 5)).epsilon(1e-13));
    // symmetric about 1/2
    CHECK(g.eval(0.3) == doctest::Approx(g.eval(0.7)).epsilon(1e-13));
}

TEST_CASE("poly derivative matches finite differences") {
    Poly g = bump_poly(3);
    Poly g1 = g.derivative();
    Poly g2 = g.derivative(2);
    const double u = 0.37, h = 1e-6;
    CHECK(g1.eval(u) == doctest::Approx((g.eval(u + h) - g.eval(u - h)) / (2 * h)).epsilon(1e-7));
    CHECK(g2.eval(u) ==
          doctest::Approx((g.eval(u + h) - 2 * g.eval(u) + g.eval(u - h)) / (h * h)).epsilon(1e-3));
    // derivative at the symmetry point vanishes
    CHECK(g1.eval(0.5) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("boundary flatness up to order beta") {
    // g = u^(beta+1)(1-u)^(beta+1) has a zero of order beta+1 at both ends
    Poly g = bump_poly(4);
    for (int j = 0; j <= 4; ++j) {
        CHECK(g.derivative(j).eval(0.0) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(g.derivative(j).eval(1.0) == doctest::Approx(0.0).epsilon(1e-9));
    }
    CHECK(std::abs(g.derivative(5).eval(0.0)) > 1.0);  // order 5 does not vanish
}

TEST_CASE("tensor probe evaluates as a product with compact support") {
    TensorProbe p = make_probe(2, 4);
    CHECK(p.d == 2);
    CHECK(p.beta == 4);
    Poly g = bump_poly(4);
    CHECK(p.eval({0.5, 0.5}) == doctest::Approx(9.5367431640625e-7).epsilon(1e-13));
    CHECK(p.eval({0.3, 0.8}) == doctest::Approx(g.eval(0.3) * g.eval(0.8)).epsilon(1e-13));
    CHECK(p.eval({-0.1, 0.5}) == 0.0);
    CHECK(p.eval({0.5, 1.1}) == 0.0);
}

TEST_CASE("probe derivative differentiates the right axes") {
    TensorProbe p = make_probe(2, 4);
    TensorProbe dx = probe_derivative(p, {1, 0});
    TensorProbe dy = probe_derivative(p, {0, 1});
    Poly g = bump_poly(4);
    Poly g1 = g.derivative();
    CHECK(dx.eval({0.3, 0.6}) == doctest::Approx(g1.eval(0.3) * g.eval(0.6)).epsilon(1e-12));
    CHECK(dy.eval({0.3, 0.6}) == doctest::Approx(g.eval(0.3) * g1.eval(0.6)).epsilon(1e-12));
    // order (4,0) still vanishes on the support boundary (flat to order beta)
    TensorProbe d4 = probe_derivative(p, {4, 0});
    CHECK(d4.eval({0.0, 0.5}) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("exact l2 norm against the beta integral") {
    // int_0^1 u^10 (1-u)^10 du = B(11,11) = (10!)^2 / 21!
    const double B11 = 2.5774019582069117e-07;
    TensorProbe p2 = make_probe(2, 4);
    // d=2 norm: sqrt(B * B) = B
    CHECK(probe_l2_norm(p2) == doctest::Approx(B11).epsilon(1e-8));
    TensorProbe p1 = make_probe(1, 4);
    CHECK(probe_l2_norm(p1) == doctest::Approx(std::sqrt(B11)).epsilon(1e-8));
    // norm^2 equals the self inner product
    double n = probe_l2_norm(p2);
    CHECK(probe_inner(p2, p2) == doctest::Approx(n * n).epsilon(1e-10));
}

TEST_CASE("inner products obey parity and integration by parts") {
    TensorProbe p = make_probe(2, 4);
    TensorProbe dx = probe_derivative(p, {1, 0});
    TensorProbe dy = probe_derivative(p, {0, 1});
    TensorProbe dxx = probe_derivative(p, {2, 0});

    // int g' g = 0 per axis, so the mixed first-derivative pairing vanishes
    CHECK(probe_inner(dx, dy) == doctest::Approx(0.0).epsilon(1e-18));

    // <d2x phi, phi> = -||dx phi||^2 (boundary terms vanish)
    double lhs = probe_inner(dxx, p);
    double rhs = -probe_inner(dx, dx);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    // frozen magnitude: int g'^2 * int g^2
    CHECK(-lhs == doctest::Approx(6.013937841942152e-06 * 2.5774019582069117e-07).epsilon(1e-7));
}

TEST_CASE("midpoint samples agree with eval") {
    TensorProbe p = make_probe(2, 4);
    const int k = 8;
    std::vector<double> s = probe_samples(p, k);
    REQUIRE(s.size() == std::size_t(k) * k);
    for (int ix = 0; ix < k; ++ix)
        for (int iy = 0; iy < k; ++iy) {
            double ex = p.eval({(ix + 0.5) / k, (iy + 0.5) / k});
            CHECK(s[std::size_t(ix) * k + iy] == doctest::Approx(ex).epsilon(1e-14));
        }
}
