#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <vector>

#include "doctest.h"
#include "miscat/dictionary.hpp"

using namespace miscat;

namespace {

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
    REQUIRE(a.size() == b.size());
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("angular scale convention") {
    ConvolutionKernelSpec k{2, 2, 0.0243};
    CHECK(kernel_angular_scale(k) == doctest::Approx(0.0243 / M_PI).epsilon(1e-15));
}

TEST_CASE("identity kernel reduces the stencil to probe samples") {
    TensorProbe p = make_probe(2, 4);
    ConvolutionKernelSpec id{2, 0, 0.0243};
    const int kx = 6, ky = 9, n = 64;
    DictionaryElement el = build_phi_h(p, id, kx, ky, n);
    REQUIRE(el.stencil.size() == std::size_t(kx) * ky);
    // a = 0: no correction terms, the stencil is the probe on box midpoints
    for (int ix = 0; ix < kx; ++ix)
        for (int iy = 0; iy < ky; ++iy) {
            double want = p.eval({(ix + 0.5) / kx, (iy + 0.5) / ky});
            CHECK(el.stencil[std::size_t(ix) * ky + iy] == doctest::Approx(want).epsilon(1e-13));
        }
}

TEST_CASE("first order expansion identity") {
    // a=1: h1 h2 scaling of the stencil equals h1 h2 phi - beff^2 (d2x + d2y) phi
    // up to the anisotropic split, checked termwise on midpoints
    TensorProbe p = make_probe(2, 4);
    ConvolutionKernelSpec k1{2, 1, 0.031};
    const int kx = 7, ky = 5, n = 128;
    const double h1 = double(kx) / n, h2 = double(ky) / n;
    const double beff = kernel_angular_scale(k1);
    DictionaryElement el = build_phi_h(p, k1, kx, ky, n);
    TensorProbe dxx = probe_derivative(p, {2, 0});
    TensorProbe dyy = probe_derivative(p, {0, 2});
    double worst = 0;
    for (int ix = 0; ix < kx; ++ix)
        for (int iy = 0; iy < ky; ++iy) {
            double ux = (ix + 0.5) / kx, uy = (iy + 0.5) / ky;
            double want = p.eval({ux, uy}) -
                          beff * beff *
                              (dxx.eval({ux, uy}) / (h1 * h1) + dyy.eval({ux, uy}) / (h2 * h2));
            worst = std::max(worst,
                             std::abs(el.stencil[std::size_t(ix) * ky + iy] - want));
        }
    CHECK(worst < 1e-9);
}

TEST_CASE("stencil matches the fourier division oracle") {
    TensorProbe p = make_probe(2, 4);
    const int n = 64;
    for (int a : {0, 1, 2}) {
        ConvolutionKernelSpec k{2, a, 0.0243};
        for (auto [kx, ky] : {std::pair{6, 10}, std::pair{8, 8}}) {
            DictionaryElement el = build_phi_h(p, k, kx, ky, n);
            std::vector<double> oracle = build_phi_h_fourier_oracle(p, k, kx, ky, n);
            CHECK(rel_l2(el.stencil, oracle) < 1e-4);
        }
    }
}

TEST_CASE("fourier oracle is stable under oversample refinement") {
    TensorProbe p = make_probe(2, 4);
    ConvolutionKernelSpec k{2, 1, 0.0243};
    const int kx = 8, ky = 8, n = 64;
    std::vector<double> c9 = build_phi_h_fourier_oracle(p, k, kx, ky, n, 9);
    std::vector<double> c19 = build_phi_h_fourier_oracle(p, k, kx, ky, n, 19);
    CHECK(rel_l2(c9, c19) < 1e-5);
}

TEST_CASE("norms are consistent with the stencil") {
    TensorProbe p = make_probe(2, 4);
    ConvolutionKernelSpec k{2, 2, 0.0243};
    const int kx = 10, ky = 6, n = 256;
    DictionaryElement el = build_phi_h(p, k, kx, ky, n);
    double ss = 0, sa = 0;
    for (double v : el.stencil) {
        ss += v * v;
        sa += std::abs(v);
    }
    CHECK(el.norm_pixel == doctest::Approx(std::sqrt(ss)).epsilon(1e-12));
    // midpoint quadrature over the box: cell volume is 1/n^2
    CHECK(el.l2_norm == doctest::Approx(std::sqrt(ss) / n).epsilon(1e-12));
    CHECK(el.l1_norm == doctest::Approx(sa / (double(n) * n)).epsilon(1e-12));
    CHECK(el.kx == kx);
    CHECK(el.ky == ky);
    CHECK(el.n == n);
}

TEST_CASE("scaled stencil norm approaches the small-scale limit shape") {
    TensorProbe p = make_probe(2, 4);
    ConvolutionKernelSpec k{2, 2, 0.0243};
    auto [shape, limit_norm] = xi_limit(p, k, 256);
    // frozen: ||Xi|| = beff^4 * sqrt(5.7272233161015663e-06)
    const double beff = kernel_angular_scale(k);
    CHECK(limit_norm ==
          doctest::Approx(std::pow(beff, 4) * 0.0023931617822666243).epsilon(5e-4));
    // h^{2a} ||Phi_h|| at a small square scale approaches it
    const int kk = 12, n = 768;
    const double h = double(kk) / n;
    DictionaryElement el = build_phi_h(p, k, kk, kk, n);
    CHECK(el.l2_norm * std::pow(h, 4) == doctest::Approx(limit_norm).epsilon(2e-2));
}

TEST_CASE("undersmoothed probes need the explicit flag") {
    TensorProbe rough = make_probe(2, 1);
    ConvolutionKernelSpec k{2, 2, 0.0243};
    CHECK_THROWS_AS(build_phi_h(rough, k, 8, 8, 64), error);
    DictionaryElement el = build_phi_h(rough, k, 8, 8, 64, true);
    CHECK(el.norm_pixel > 0.0);
    // beta = 2a is smooth enough without the flag
    TensorProbe smooth = make_probe(2, 4);
    CHECK_NOTHROW(build_phi_h(smooth, k, 8, 8, 64));
}

TEST_CASE("gumbel constant value and invariances") {
    TensorProbe p = make_probe(2, 4);
    ConvolutionKernelSpec k{2, 2, 0.0243};
    // frozen oracle: det(D^-1) log(Delta/delta) (2pi)^(-3/2) for beta=4, a=2
    CHECK(deconv_gumbel_K(p, k, 0.2, 0.5) == doctest::Approx(6.7265656274462629).epsilon(1e-10));
    // bandwidth drops out of the unit-normalized limit shape
    ConvolutionKernelSpec kb{2, 2, 0.1};
    CHECK(deconv_gumbel_K(p, kb, 0.2, 0.5) ==
          doctest::Approx(deconv_gumbel_K(p, k, 0.2, 0.5)).epsilon(1e-12));
    // depends on delta, Delta only through the ratio
    CHECK(deconv_gumbel_K(p, k, 0.1, 0.25) ==
          doctest::Approx(deconv_gumbel_K(p, k, 0.2, 0.5)).epsilon(1e-12));
    // linear in log(Delta/delta)
    CHECK(deconv_gumbel_K(p, k, 0.05, 0.8) / deconv_gumbel_K(p, k, 0.2, 0.5) ==
          doctest::Approx(std::log(16.0) / std::log(2.5)).epsilon(1e-12));
    // guards
    CHECK_THROWS_AS(deconv_gumbel_K(p, k, 0.5, 0.2), error);
    TensorProbe rough = make_probe(2, 3);
    CHECK_THROWS_AS(deconv_gumbel_K(rough, k, 0.2, 0.5), error);
}

TEST_CASE("gumbel constant against a quadrature oracle") {
    // independent route: midpoint quadrature of the gradient Gram determinant
    // of the unit-normalized limit shape
    TensorProbe p = make_probe(2, 4);
    TensorProbe t40 = probe_derivative(p, {4, 0});
    TensorProbe t22 = probe_derivative(p, {2, 2});
    TensorProbe t04 = probe_derivative(p, {0, 4});
    TensorProbe t50 = probe_derivative(p, {5, 0});
    TensorProbe t32 = probe_derivative(p, {3, 2});
    TensorProbe t14 = probe_derivative(p, {1, 4});
    TensorProbe t05 = probe_derivative(p, {0, 5});
    TensorProbe t23 = probe_derivative(p, {2, 3});
    TensorProbe t41 = probe_derivative(p, {4, 1});
    const int m = 400;
    double xi2 = 0, n10 = 0, n01 = 0, cr = 0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            std::vector<double> u{(i + 0.5) / m, (j + 0.5) / m};
            double xi = t40.eval(u) + 2 * t22.eval(u) + t04.eval(u);
            double g10 = t50.eval(u) + 2 * t32.eval(u) + t14.eval(u);
            double g01 = t05.eval(u) + 2 * t23.eval(u) + t41.eval(u);
            xi2 += xi * xi;
            n10 += g10 * g10;
            n01 += g01 * g01;
            cr += g10 * g01;
        }
    double cell = 1.0 / (double(m) * m);
    double det = std::sqrt(n10 * n01 - cr * cr) * cell / (xi2 * cell);
    double want = det * std::log(2.5) * std::pow(2.0 * M_PI, -1.5);
    ConvolutionKernelSpec k{2, 2, 0.0243};
    CHECK(deconv_gumbel_K(p, k, 0.2, 0.5) == doctest::Approx(want).epsilon(1e-3));
}

TEST_CASE("dictionary build order and csv dump") {
    TensorProbe p = make_probe(2, 4);
    ConvolutionKernelSpec k{2, 2, 0.0243};
    std::vector<std::pair<int, int>> scales{{4, 4}, {4, 8}, {12, 6}};
    auto dict = build_dictionary(p, k, scales, 128);
    REQUIRE(dict.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(dict[i].kx == scales[i].first);
        CHECK(dict[i].ky == scales[i].second);
        CHECK(dict[i].l2_norm > 0.0);
    }
    const char* path = "./tmp_dict_dump.csv";
    dump_dictionary_csv(dict, path);
    std::FILE* f = std::fopen(path, "r");
    REQUIRE(f != nullptr);
    int lines = 0;
    for (int c; (c = std::fgetc(f)) != EOF;)
        if (c == '\n') ++lines;
    std::fclose(f);
    std::remove(path);
    CHECK(lines == 4);  // header + one row per element
}
