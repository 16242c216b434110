#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "miscat/gauss_calib.hpp"
#include "miscat/scan.hpp"

using namespace miscat;

namespace {

// deterministic, rng-free test fields
GridSignal wavy_field(int n, double amp, double f1, double f2) {
    GridSignal g = GridSignal::zeros(2, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g.at(i, j) = amp * std::sin(f1 * i + 0.3) * std::cos(f2 * j - 0.7) +
                         0.1 * amp * std::sin(0.9 * (i + 2 * j));
    return g;
}

GridSignal positive_field(int n) {
    GridSignal g = GridSignal::zeros(2, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g.at(i, j) = 0.5 + 0.3 * std::sin(1.3 * i) * std::sin(0.7 * j);
    return g;
}

ScanConfig small_config(int n, std::vector<Scale> scales, bool two_sided = false) {
    ScanConfig cfg;
    cfg.n = n;
    cfg.scales = std::move(scales);
    cfg.calibration = CalibrationParams{2.0, 3.0, 1.0, 2};  // K/h >= sqrt(e) for all h below
    cfg.alpha = 0.1;
    cfg.two_sided = two_sided;
    return cfg;
}

std::vector<DictionaryElement> small_dict(const ScanConfig& cfg) {
    TensorProbe p = make_probe(2, 4);
    ConvolutionKernelSpec k{2, 2, 0.0243};
    std::vector<std::pair<int, int>> px;
    for (const auto& s : cfg.scales) px.emplace_back(s.kx, s.ky);
    return build_dictionary(p, k, px, cfg.n);
}

}  // namespace

TEST_CASE("scale range enumeration") {
    auto sq = scale_range(4, 30, 2);
    REQUIRE(sq.size() == 196);  // 14 x 14 anisotropic product
    CHECK(sq.front().kx == 4);
    CHECK(sq.front().ky == 4);
    CHECK(sq.back().kx == 30);
    CHECK(sq.back().ky == 30);
    CHECK(sq[1].kx == 4);
    CHECK(sq[1].ky == 6);
    CHECK(sq[14].kx == 6);
    CHECK_THROWS_AS(scale_range(8, 4, 2), error);
    CHECK_THROWS_AS(scale_range(4, 8, 0), error);
}

TEST_CASE("config validation") {
    ScanConfig cfg = small_config(32, {{4, 4}});
    CHECK_NOTHROW(cfg.validate());
    ScanConfig bad = cfg;
    bad.scales.clear();
    CHECK_THROWS_AS(bad.validate(), error);
    bad = cfg;
    bad.alpha = 0.0;
    CHECK_THROWS_AS(bad.validate(), error);
    bad = cfg;
    bad.scales = {{40, 4}};
    CHECK_THROWS_AS(bad.validate(), error);
    bad = cfg;
    bad.boundary_margin_px = 15;  // 4 + 30 > 32
    CHECK_THROWS_AS(bad.validate(), error);
    bad = cfg;
    bad.calibration.K = 0.02;  // K/h below sqrt(e) at h = 16/1024
    CHECK_THROWS_AS(bad.validate(), error);
}

TEST_CASE("fft correlation equals brute force") {
    const int n = 32;
    ScanConfig cfg = small_config(n, {{3, 5}, {4, 4}, {6, 2}});
    auto dict = small_dict(cfg);
    GridSignal Y = wavy_field(n, 2.0, 1.1, 0.6);
    GridSignal var = positive_field(n);

    for (int margin : {0, 2}) {
        cfg.boundary_margin_px = margin;
        LocalStatistics ls = scan_statistic(Y, var, cfg, dict);
        REQUIRE(ls.coefficients.size() == dict.size());
        double global_max = -std::numeric_limits<double>::infinity();
        for (std::size_t si = 0; si < dict.size(); ++si) {
            const DictionaryElement& el = dict[si];
            const StatField& coef = ls.coefficients[si];
            const StatField& sig = ls.sigmas[si];
            const StatField& st = ls.stats[si];
            CHECK(coef.x0 == margin);
            CHECK(coef.nx == n - el.kx + 1 - 2 * margin);
            const double w = omega(cfg.calibration, cfg.h_product(cfg.scales[si]));
            for (int ix = 0; ix < coef.nx; ++ix)
                for (int iy = 0; iy < coef.ny; ++iy) {
                    int tx = ix + coef.x0, ty = iy + coef.y0;
                    double c = 0, v = 0;
                    for (int bx = 0; bx < el.kx; ++bx)
                        for (int by = 0; by < el.ky; ++by) {
                            double s = el.stencil[std::size_t(bx) * el.ky + by];
                            c += Y.at(tx + bx, ty + by) * s;
                            v += var.at(tx + bx, ty + by) * s * s;
                        }
                    c /= double(n) * n;
                    double sg = std::sqrt(v / (double(n) * n * n * n));
                    CHECK(coef.at(ix, iy) == doctest::Approx(c).epsilon(1e-9));
                    CHECK(sig.at(ix, iy) == doctest::Approx(sg).epsilon(1e-9));
                    double stat = w * (c / sg - w);
                    CHECK(st.at(ix, iy) == doctest::Approx(stat).epsilon(1e-8));
                    global_max = std::max(global_max, stat);
                }
        }
        CHECK(ls.max_statistic == doctest::Approx(global_max).epsilon(1e-10));
    }
}

TEST_CASE("streaming scan agrees with the full scan") {
    const int n = 32;
    ScanConfig cfg = small_config(n, {{4, 4}, {6, 6}}, true);
    auto dict = small_dict(cfg);
    GridSignal Y = wavy_field(n, 1.5, 0.8, 1.7);
    GridSignal var = positive_field(n);

    LocalStatistics ls = scan_statistic(Y, var, cfg, dict);
    ScanResult direct = scan_reject(Y, var, cfg, dict, std::nullopt);
    CHECK(direct.max_statistic == doctest::Approx(ls.max_statistic).epsilon(1e-12));
    CHECK(direct.rejections.empty());

    double q = ls.max_statistic - 0.4;  // forces a nonempty rejection set
    ScanResult thr = scan_reject(Y, var, cfg, dict, q);
    ScanResult ref = reject_set(ls, q);
    REQUIRE(thr.rejections.size() == ref.rejections.size());
    CHECK(!thr.rejections.empty());
    for (std::size_t i = 0; i < thr.rejections.size(); ++i) {
        CHECK(thr.rejections[i].tx == ref.rejections[i].tx);
        CHECK(thr.rejections[i].ty == ref.rejections[i].ty);
        CHECK(thr.rejections[i].kx == ref.rejections[i].kx);
        CHECK(thr.rejections[i].value == doctest::Approx(ref.rejections[i].value).epsilon(1e-12));
        CHECK(thr.rejections[i].value > q);
    }
}

TEST_CASE("sidedness flag controls negative detections") {
    const int n = 64;
    ScanConfig cfg = small_config(n, {{8, 8}});
    // identity kernel keeps the stencil nonnegative, so a negative signal
    // cannot produce a positive coefficient at any anchor
    TensorProbe p = make_probe(2, 4);
    ConvolutionKernelSpec id{2, 0, 0.0243};
    auto dict = build_dictionary(p, id, {{8, 8}}, n);
    GridSignal var = GridSignal::zeros(2, n);
    for (double& v : var.values) v = 1.0;
    GridSignal Y = GridSignal::zeros(2, n);
    for (int i = 24; i < 32; ++i)
        for (int j = 24; j < 32; ++j) Y.at(i, j) = -40.0;

    LocalStatistics one = scan_statistic(Y, var, cfg, dict);
    cfg.two_sided = true;
    LocalStatistics two = scan_statistic(Y, var, cfg, dict);
    CHECK(one.max_statistic < 0.0);   // every z is <= 0, so stat <= -omega^2
    CHECK(two.max_statistic > 10.0);  // |coef| flips the sign
}

TEST_CASE("zero box pruning marks uncovered anchors") {
    const int n = 32;
    ScanConfig cfg = small_config(n, {{4, 4}});
    auto dict = small_dict(cfg);
    GridSignal var = positive_field(n);
    GridSignal Y = GridSignal::zeros(2, n);
    Y.at(10, 20) = 3.0;  // single photon
    cfg.prune_zero_boxes = true;
    LocalStatistics ls = scan_statistic(Y, var, cfg, dict);
    const StatField& st = ls.stats[0];
    int finite = 0;
    for (int ix = 0; ix < st.nx; ++ix)
        for (int iy = 0; iy < st.ny; ++iy) {
            bool covers = (ix + st.x0 <= 10 && 10 < ix + st.x0 + 4 && iy + st.y0 <= 20 &&
                           20 < iy + st.y0 + 4);
            if (covers) {
                CHECK(std::isfinite(st.at(ix, iy)));
                ++finite;
            } else {
                CHECK(st.at(ix, iy) == -std::numeric_limits<double>::infinity());
            }
        }
    CHECK(finite == 16);  // 4x4 anchors reach the pixel
}

TEST_CASE("significance map paints minimal covering area") {
    ScanResult res;
    res.max_statistic = 9.0;
    res.quantile_used = 3.0;
    res.rejections = {{2, 2, 4, 4, 5.0}, {0, 0, 8, 8, 4.0}};
    GridSignal m = significance_map(res, 16);
    CHECK(m.at(3, 3) == 16.0);    // inside both boxes, min area 4*4
    CHECK(m.at(0, 0) == 64.0);    // only the 8x8 box
    CHECK(m.at(12, 12) == -1.0);  // uncovered
    CHECK(m.at(2, 5) == doctest::Approx(16.0));
    CHECK(m.at(7, 7) == 64.0);
}

TEST_CASE("direct indicator scan against a reference loop") {
    const int n = 16;
    GridSignal Y = wavy_field(n, 1.0, 0.9, 1.3);
    std::vector<Scale> scales{{2, 2}, {4, 3}};
    double got = direct_ds_statistic(Y, scales);

    double want = -std::numeric_limits<double>::infinity();
    for (const Scale& s : scales) {
        double h1 = double(s.kx) * s.ky / (double(n) * n);
        double lg = std::log(3.0 / h1);
        double pen = std::sqrt(lg) / std::log(lg);
        double thr = std::sqrt(2.0 * lg);
        for (int tx = 0; tx + s.kx <= n; ++tx)
            for (int ty = 0; ty + s.ky <= n; ++ty) {
                double acc = 0;
                for (int bx = 0; bx < s.kx; ++bx)
                    for (int by = 0; by < s.ky; ++by) acc += Y.at(tx + bx, ty + by);
                want = std::max(want, pen * (acc / std::sqrt(double(s.kx) * s.ky) - thr));
            }
    }
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("detection threshold formula") {
    ScanConfig cfg = small_config(64, {{8, 8}});
    auto dict = small_dict(cfg);
    const double q = 3.0, w = 2.0;
    double sigma = detection_threshold_sigma(dict[0], q, w, 64);
    double h = 8.0 / 64.0;
    double want = std::sqrt(h * h * 64.0 * 64.0) / dict[0].l2_norm / (2.0 * (q / w + w));
    CHECK(sigma == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("oracle power endpoints") {
    const double alpha = 0.1, q = 2.5, h = 1.0 / 256.0;
    double s0 = std::sqrt(2.0 * std::log(1.0 / h));
    // signal exactly at the boundary: half detection probability beyond alpha
    CHECK(oracle_power(s0, 1.0, h, alpha, q) == doctest::Approx(alpha + (1 - alpha) * 0.5).epsilon(1e-12));
    // three sigmas above: nearly full power
    CHECK(oracle_power(s0 + 3.0, 1.0, h, alpha, q) > 0.99);
    // zero signal: alpha by construction
    CHECK(oracle_power(0.0, 1.0, h, alpha, q) == doctest::Approx(alpha + (1 - alpha) * 0.5 *
          std::erfc(s0 / std::sqrt(2.0))).epsilon(1e-12));
    CHECK(oracle_power(0.0, 1.0, h, alpha, q) < alpha + 0.01);
}

TEST_CASE("guaranteed detections from large components") {
    const int n = 64;
    ScanConfig cfg = small_config(n, {{8, 8}});
    auto dict = small_dict(cfg);
    TensorProbe p = make_probe(2, 4);
    GridSignal var = GridSignal::zeros(2, n);
    for (double& v : var.values) v = 1.0;
    const double q = 3.0;
    const double w = omega(cfg.calibration, cfg.h_product(cfg.scales[0]));

    // constant block on the box at (20, 28): <f, phi>_n = A * sum(phi)/n^2,
    // while sigma comes from the deconvolution stencil
    std::vector<double> probe_px = probe_samples(p, 8);
    double psum = 0;
    for (double v : probe_px) psum += v;
    double sigma_i = dict[0].norm_pixel / (double(n) * n);  // var = 1
    double needed = 2.0 * (q / w + w) * sigma_i;
    double amp = 1.2 * needed * (double(n) * n) / psum;

    GridSignal f = GridSignal::zeros(2, n);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) f.at(20 + i, 28 + j) = amp;

    auto hits = large_components(f, var, cfg, dict, p, q);
    bool found = false;
    for (const auto& r : hits)
        if (r.tx == 20 && r.ty == 28 && r.kx == 8) found = true;
    CHECK(found);

    // slightly below the guarantee threshold: the anchor must drop out
    for (double& v : f.values) v *= 0.75 / 1.2;
    auto none = large_components(f, var, cfg, dict, p, q);
    for (const auto& r : none) CHECK(!(r.tx == 20 && r.ty == 28));
}

TEST_CASE("scan csv export") {
    ScanResult res;
    res.max_statistic = 5.5;
    res.quantile_used = 3.25;
    res.rejections = {{1, 2, 4, 6, 4.75}};
    const char* path = "./tmp_scan_result.csv";
    write_scan_csv(res, path);
    std::FILE* f = std::fopen(path, "r");
    REQUIRE(f != nullptr);
    char line[256];
    REQUIRE(std::fgets(line, sizeof line, f) != nullptr);  // header
    REQUIRE(std::fgets(line, sizeof line, f) != nullptr);
    int tx, ty, kx, ky;
    double val;
    CHECK(std::sscanf(line, "%d,%d,%d,%d,%lf", &tx, &ty, &kx, &ky, &val) == 5);
    CHECK(tx == 1);
    CHECK(ky == 6);
    CHECK(val == doctest::Approx(4.75));
    std::fclose(f);
    std::remove(path);
}
