#pragma once

// Synthetic observation models on the pixel grid, their exact per-pixel
// variances, pointwise maximum-likelihood variance estimates, and the
// deterministic phantom test images.

#include <cstdint>
#include <string>

#include "miscat/grid.hpp"

namespace miscat {

enum class NoiseKind { gaussian, student_t, poisson_gauss, binomial_sted };

NoiseKind noise_kind_from_string(const std::string& s);
std::string noise_kind_to_string(NoiseKind kind);
std::string to_string(NoiseKind k);

struct NoiseSpec {
    NoiseKind kind = NoiseKind::gaussian;
    double sigma = 1.0;      // gaussian, poisson_gauss
    int nu = 3;              // student_t, must be > 2 for a finite variance
    double t = 1000.0;       // poisson_gauss exposure, binomial_sted trials
    double background = 0.0; // poisson_gauss offset b

    void validate() const;

    // heavy-tail flag: the scaled t family fails the exponential-moment
    // requirement of the level guarantee for every nu, so level studies
    // annotate the expected breakdown
    bool violates_moment_condition() const { return kind == NoiseKind::student_t; }
};

// Per-pixel independent draws keyed by (seed, pixel index), so the field is
// reproducible under any parallel fill order.
//   gaussian       Y = truth + sigma * Z
//   student_t      Y = truth + T_nu
//   poisson_gauss  Y = Poi(t*(truth + b))/t - b + sigma * Z
//   binomial_sted  Y = Bin(t, truth), raw counts, truth must lie in [0,1]
GridSignal generate(const GridSignal& truth, const NoiseSpec& spec, std::uint64_t seed,
                    std::uint32_t rep = 0);

// Exact variance field of generate() given the noiseless truth.
GridSignal variance_truth(const NoiseSpec& spec, const GridSignal& truth);

// Pointwise plug-in estimates from one observed field. binomial_sted: p_hat =
// clamp(Y/t, 1/(2t), 1-1/(2t)), variance t*p_hat*(1-p_hat). poisson_gauss:
// lambda_hat = max(Y + b, b + 1/(2t)), variance lambda_hat/t + sigma^2. The
// half-count floor keeps empty pixels from reporting zero variance.
GridSignal variance_mle(const GridSignal& Y, const NoiseSpec& spec);

enum class PhantomKind { circles_squares_lines, origami };

PhantomKind phantom_kind_from_string(const std::string& s);

// Deterministic binary {0,1} test images scaled to an n-by-n grid, n >= 128.
// circles_squares_lines: rows of 3, 6 and 12 circles of decreasing radius, a
// row of squares of varying widths, and a full-width line of the same height;
// the square row and the line are separated by round(9n/512) pixels.
// origami: pairs of parallel strands 7 pixels apart (71 nm at 10 nm pixels).
GridSignal phantom(PhantomKind kind, int n);

// Regions used by power studies: pixel-index bounding boxes of the three
// large top-row circles of circles_squares_lines at grid size n. Axis 0 is
// the slow (row) index, matching GridSignal::at and scan anchors.
struct PixelBox {
    int a0, b0, a1, b1;  // half-open [a0,a1) x [b0,b1), axis 0 first
};
std::vector<PixelBox> phantom_large_circles(int n);

}  // namespace miscat
