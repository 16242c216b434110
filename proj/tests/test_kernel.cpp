#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "miscat/kernel.hpp"
#include "miscat/rng.hpp"

using namespace miscat;

TEST_CASE("fourier symbol closed form") {
    ConvolutionKernelSpec k{2, 2, 0.0243};
    CHECK(fourier_symbol(k, {0.0, 0.0}) == 1.0);
    CHECK(fourier_symbol(k, {2.0, 0.0}) == doctest::Approx(0.9952927640121733).epsilon(1e-14));
    CHECK(fourier_symbol(k, {6.0, 10.0}) == doctest::Approx(0.8568521861269046).epsilon(1e-14));
    // radial: depends on |xi| only
    CHECK(fourier_symbol(k, {6.0, 10.0}) == fourier_symbol(k, {10.0, 6.0}));
    CHECK(fourier_symbol(k, {6.0, 10.0}) == fourier_symbol(k, {-6.0, 10.0}));
    // a = 0 is the identity kernel
    ConvolutionKernelSpec id{2, 0, 0.0243};
    CHECK(fourier_symbol(id, {123.0, -7.0}) == 1.0);
}

TEST_CASE("convolve preserves the mean") {
    const int n = 64;
    ConvolutionKernelSpec k{2, 2, 0.0243};
    GridSignal f = GridSignal::zeros(2, n);
    fill_normal(f.values.data(), f.values.size(), 31, 0, 0);
    double mean0 = 0;
    for (double v : f.values) mean0 += v;
    GridSignal g = convolve(k, f);
    double mean1 = 0;
    for (double v : g.values) mean1 += v;
    CHECK(mean1 / f.values.size() == doctest::Approx(mean0 / f.values.size()).epsilon(1e-12));
}

// Lattice cosines are eigenfunctions: convolving cos(2 pi m.x) multiplies by
// the symbol at xi = 2m, pinning the mode/frequency convention.
TEST_CASE("convolve eigenvalue on a pure cosine") {
    const int n = 64;
    ConvolutionKernelSpec k{2, 2, 0.0243};
    GridSignal f = GridSignal::zeros(2, n);
    const int mx = 3, my = 5;
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy) {
            double x = (ix + 0.5) / n, y = (iy + 0.5) / n;
            f.at(ix, iy) = std::cos(2.0 * M_PI * (mx * x + my * y));
        }
    GridSignal g = convolve(k, f);
    const double factor = fourier_symbol(k, {2.0 * mx, 2.0 * my});
    CHECK(factor == doctest::Approx(0.8568521861269046).epsilon(1e-14));
    double worst = 0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        worst = std::max(worst, std::abs(g.values[i] - factor * f.values[i]));
    CHECK(worst < 1e-12);
}

TEST_CASE("kernel field normalization and center") {
    ConvolutionKernelSpec k{2, 2, 0.0243};
    const int n = 128;
    GridSignal g = kernel_field(k, n);
    double sum = 0, peak = -1;
    int px = -1, py = -1;
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy) {
            sum += g.at(ix, iy);
            if (g.at(ix, iy) > peak) {
                peak = g.at(ix, iy);
                px = ix;
                py = iy;
            }
        }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(px == n / 2);
    CHECK(py == n / 2);
}

TEST_CASE("fwhm of the production kernel") {
    // b = 0.0243 at n = 512 was chosen to give roughly a 10 pixel width
    ConvolutionKernelSpec k{2, 2, 0.0243};
    CHECK(fwhm(k, 512) == doctest::Approx(10.016188).epsilon(2e-4));
    // pixel_size only rescales the report
    CHECK(fwhm(k, 512, 2.0) == doctest::Approx(2.0 * fwhm(k, 512)).epsilon(1e-12));
}

TEST_CASE("fwhm of the microscopy configuration") {
    // 600 pixels at 10 nm: target width 77.5881 nm within 1 nm
    ConvolutionKernelSpec k{2, 2, 0.016};
    double w = fwhm(k, 600, 10.0);
    CHECK(w == doctest::Approx(77.720766).epsilon(1e-3));
    CHECK(std::abs(w - 77.5881) < 1.0);
}

TEST_CASE("moment ratio equals 2(a+1)/a") {
    ConvolutionKernelSpec k2{2, 2, 0.0243};
    CHECK(kurtosis(k2, 512) == doctest::Approx(3.0).epsilon(2e-4));
    ConvolutionKernelSpec k1{2, 1, 0.05};
    CHECK(kurtosis(k1, 512) == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("field oracles on a gaussian symbol") {
    // exp(-sigma^2 w^2 / 2) synthesizes an isotropic gaussian of width sigma
    const double sigma = 0.02;
    const int n = 256;
    GridSignal g = field_of_radial_symbol(2, n, 1.0, [&](double w) {
        return std::exp(-0.5 * sigma * sigma * w * w);
    });
    // planar moment ratio E|X|^4 / (E|X|^2)^2 = 2 for a 2-d gaussian
    CHECK(kurtosis_of_field(g) == doctest::Approx(2.0).epsilon(5e-3));
    // fwhm = 2 sqrt(2 ln 2) sigma, in pixels
    CHECK(fwhm_of_field(g) ==
          doctest::Approx(2.3548200450309493 * sigma * n).epsilon(2e-3));
}
