#include "miscat/noise.hpp"

#include <algorithm>
#include <cmath>

#include "miscat/rng.hpp"

namespace miscat {

NoiseKind noise_kind_from_string(const std::string& s) {
    if (s == "gaussian") return NoiseKind::gaussian;
    if (s == "student_t") return NoiseKind::student_t;
    if (s == "poisson_gauss") return NoiseKind::poisson_gauss;
    if (s == "binomial_sted") return NoiseKind::binomial_sted;
    throw error("unknown noise kind: " + s);
}

std::string noise_kind_to_string(NoiseKind k) {
    switch (k) {
        case NoiseKind::gaussian: return "gaussian";
        case NoiseKind::student_t: return "student_t";
        case NoiseKind::poisson_gauss: return "poisson_gauss";
        case NoiseKind::binomial_sted: return "binomial_sted";
    }
    return "?";
}

std::string to_string(NoiseKind k) { return noise_kind_to_string(k); }

void NoiseSpec::validate() const {
    switch (kind) {
        case NoiseKind::gaussian:
            if (sigma < 0) throw error("gaussian: sigma must be >= 0");
            break;
        case NoiseKind::student_t:
            if (nu <= 2) throw error("student_t: nu must exceed 2 for a finite variance");
            break;
        case NoiseKind::poisson_gauss:
            if (t < 1) throw error("poisson_gauss: t must be >= 1");
            if (background < 0) throw error("poisson_gauss: background must be >= 0");
            if (sigma < 0) throw error("poisson_gauss: sigma must be >= 0");
            break;
        case NoiseKind::binomial_sted:
            if (t < 1 || t != std::floor(t)) throw error("binomial_sted: t must be a positive integer");
            break;
    }
}

namespace {

// stream tag separating observation noise from the reference-field stream
constexpr uint32_t kNoiseStream = 1;

}  // namespace

GridSignal generate(const GridSignal& truth, const NoiseSpec& spec, std::uint64_t seed,
                    std::uint32_t rep) {
    spec.validate();
    GridSignal out = truth;
    const std::size_t N = truth.size();
    switch (spec.kind) {
        case NoiseKind::gaussian:
            for (std::size_t j = 0; j < N; ++j) {
                RngStream s(seed, kNoiseStream, rep, uint32_t(j));
                out.values[j] = truth.values[j] + spec.sigma * s.normal();
            }
            break;
        case NoiseKind::student_t:
            for (std::size_t j = 0; j < N; ++j) {
                RngStream s(seed, kNoiseStream, rep, uint32_t(j));
                out.values[j] = truth.values[j] + s.student_t(spec.nu);
            }
            break;
        case NoiseKind::poisson_gauss:
            for (std::size_t j = 0; j < N; ++j) {
                RngStream s(seed, kNoiseStream, rep, uint32_t(j));
                const double lam = spec.t * (truth.values[j] + spec.background);
                if (lam < 0) throw error("poisson_gauss: truth + background must be >= 0");
                double y = double(s.poisson(lam)) / spec.t - spec.background;
                if (spec.sigma > 0) y += spec.sigma * s.normal();
                out.values[j] = y;
            }
            break;
        case NoiseKind::binomial_sted: {
            const int trials = int(spec.t);
            for (std::size_t j = 0; j < N; ++j) {
                const double p = truth.values[j];
                if (p < 0 || p > 1) throw error("binomial_sted: truth must lie in [0,1]");
                RngStream s(seed, kNoiseStream, rep, uint32_t(j));
                int count = 0;
                for (int k = 0; k < trials; ++k) count += s.uniform() < p;
                out.values[j] = count;
            }
            break;
        }
    }
    return out;
}

GridSignal variance_truth(const NoiseSpec& spec, const GridSignal& truth) {
    spec.validate();
    GridSignal v = truth;
    const std::size_t N = truth.size();
    switch (spec.kind) {
        case NoiseKind::gaussian:
            std::fill(v.values.begin(), v.values.end(), spec.sigma * spec.sigma);
            break;
        case NoiseKind::student_t:
            std::fill(v.values.begin(), v.values.end(), double(spec.nu) / double(spec.nu - 2));
            break;
        case NoiseKind::poisson_gauss:
            for (std::size_t j = 0; j < N; ++j)
                v.values[j] =
                    (truth.values[j] + spec.background) / spec.t + spec.sigma * spec.sigma;
            break;
        case NoiseKind::binomial_sted:
            for (std::size_t j = 0; j < N; ++j) {
                const double p = truth.values[j];
                if (p < 0 || p > 1) throw error("binomial_sted: truth must lie in [0,1]");
                v.values[j] = spec.t * p * (1.0 - p);
            }
            break;
    }
    return v;
}

GridSignal variance_mle(const GridSignal& Y, const NoiseSpec& spec) {
    spec.validate();
    GridSignal v = Y;
    const std::size_t N = Y.size();
    switch (spec.kind) {
        case NoiseKind::binomial_sted: {
            const double lo = 1.0 / (2.0 * spec.t), hi = 1.0 - lo;
            for (std::size_t j = 0; j < N; ++j) {
                const double p = std::clamp(Y.values[j] / spec.t, lo, hi);
                v.values[j] = spec.t * p * (1.0 - p);
            }
            break;
        }
        case NoiseKind::poisson_gauss: {
            const double floor_lam = spec.background + 1.0 / (2.0 * spec.t);
            for (std::size_t j = 0; j < N; ++j) {
                const double lam = std::max(Y.values[j] + spec.background, floor_lam);
                v.values[j] = lam / spec.t + spec.sigma * spec.sigma;
            }
            break;
        }
        default:
            throw error("variance_mle: only binomial_sted and poisson_gauss are estimated");
    }
    return v;
}

PhantomKind phantom_kind_from_string(const std::string& s) {
    if (s == "circles_squares_lines") return PhantomKind::circles_squares_lines;
    if (s == "origami") return PhantomKind::origami;
    throw error("unknown phantom kind: " + s);
}

namespace {

// reference layout in 512-pixel units, scaled linearly to the target grid;
// c0 runs along the slow axis (top row = small c0), c1 along the fast axis
struct Circle {
    double c0, c1, r;
};

void layout_circles(std::vector<Circle>& out) {
    for (int i = 0; i < 3; ++i) out.push_back({85.0, (i + 0.5) * 512.0 / 3.0, 30.0});
    for (int i = 0; i < 6; ++i) out.push_back({190.0, (i + 0.5) * 512.0 / 6.0, 17.0});
    for (int i = 0; i < 12; ++i) out.push_back({270.0, (i + 0.5) * 512.0 / 12.0, 8.0});
}

constexpr double kSquareWidths[10] = {26, 22, 18, 15, 12, 10, 8, 6, 5, 4};
constexpr double kSquareGap = 30.0;
constexpr double kSquareLeft = 58.0;
constexpr double kSquareBottom = 400.0;  // squares end here; the line starts 9 below
constexpr double kLineHeight = 6.0;
constexpr double kLineMargin = 20.0;

GridSignal phantom_csl(int n) {
    GridSignal g = GridSignal::zeros(2, n);
    const double s = double(n) / 512.0;
    std::vector<Circle> circles;
    layout_circles(circles);
    for (int i0 = 0; i0 < n; ++i0) {
        for (int i1 = 0; i1 < n; ++i1) {
            const double p0 = (i0 + 0.5) / s, p1 = (i1 + 0.5) / s;
            for (const auto& c : circles) {
                const double d0 = p0 - c.c0, d1 = p1 - c.c1;
                if (d0 * d0 + d1 * d1 <= c.r * c.r) {
                    g.at(i0, i1) = 1.0;
                    break;
                }
            }
        }
    }
    // squares share a bottom edge so each keeps the same gap to the line
    const int eb = int(std::lround(kSquareBottom * s));
    double left = kSquareLeft;
    for (double w : kSquareWidths) {
        const int b0 = int(std::lround(left * s)), b1 = int(std::lround((left + w) * s));
        const int a0 = int(std::lround((kSquareBottom - w) * s));
        for (int i0 = a0; i0 < eb; ++i0)
            for (int i1 = b0; i1 < b1 && i1 < n; ++i1)
                if (i0 >= 0 && i0 < n && i1 >= 0) g.at(i0, i1) = 1.0;
        left += w + kSquareGap;
    }
    const int gap = int(std::lround(9.0 * s));
    const int la0 = eb + gap, la1 = la0 + std::max(1, int(std::lround(kLineHeight * s)));
    const int lb0 = int(std::lround(kLineMargin * s)), lb1 = n - lb0;
    for (int i0 = la0; i0 < la1 && i0 < n; ++i0)
        for (int i1 = lb0; i1 < lb1; ++i1) g.at(i0, i1) = 1.0;
    return g;
}

// strand pairs in 600-pixel units (10 nm pixels): two parallel vertical bars
// per site, centers 7 px apart
GridSignal phantom_origami(int n) {
    GridSignal g = GridSignal::zeros(2, n);
    const double s = double(n) / 600.0;
    const double strand_len = 30.0, strand_w = 2.0, pair_sep = 7.0;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            const double c0 = (r + 0.5) * 200.0, c1 = (c + 0.5) * 200.0;
            for (int side = -1; side <= 1; side += 2) {
                const double b = c1 + side * pair_sep / 2.0;
                const int b0 = int(std::lround((b - strand_w / 2.0) * s));
                const int b1 = std::max(b0 + 1, int(std::lround((b + strand_w / 2.0) * s)));
                const int a0 = int(std::lround((c0 - strand_len / 2.0) * s));
                const int a1 = int(std::lround((c0 + strand_len / 2.0) * s));
                for (int i0 = a0; i0 < a1; ++i0)
                    for (int i1 = b0; i1 < b1; ++i1)
                        if (i0 >= 0 && i0 < n && i1 >= 0 && i1 < n) g.at(i0, i1) = 1.0;
            }
        }
    }
    return g;
}

}  // namespace

GridSignal phantom(PhantomKind kind, int n) {
    if (n < 128) throw error("phantom: n must be >= 128");
    return kind == PhantomKind::circles_squares_lines ? phantom_csl(n) : phantom_origami(n);
}

std::vector<PixelBox> phantom_large_circles(int n) {
    const double s = double(n) / 512.0;
    std::vector<PixelBox> out;
    for (int i = 0; i < 3; ++i) {
        const double c0 = 85.0, c1 = (i + 0.5) * 512.0 / 3.0, r = 30.0;
        out.push_back({int(std::floor((c0 - r) * s)), int(std::floor((c1 - r) * s)),
                       int(std::ceil((c0 + r) * s)), int(std::ceil((c1 + r) * s))});
    }
    return out;
}

}  // namespace miscat
