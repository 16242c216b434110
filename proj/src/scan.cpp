#include "miscat/scan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

#include "miscat/probe.hpp"

namespace miscat {

std::vector<Scale> scale_range(int kmin, int kmax, int kstep) {
    if (kmin < 1 || kmax < kmin || kstep < 1) throw error("scale_range: bad range");
    std::vector<int> ks;
    for (int k = kmin; k <= kmax; k += kstep) ks.push_back(k);
    std::vector<Scale> out;
    out.reserve(ks.size() * ks.size());
    for (int kx : ks)
        for (int ky : ks) out.push_back({kx, ky});
    return out;
}

void ScanConfig::validate() const {
    if (n < 2) throw error("ScanConfig: grid too small");
    if (d != 2) throw error("ScanConfig: only d=2 scanning supported");
    if (scales.empty()) throw error("ScanConfig: no scales");
    if (!(alpha > 0.0 && alpha < 1.0)) throw error("ScanConfig: alpha outside (0,1)");
    if (boundary_margin_px < 0) throw error("ScanConfig: negative margin");
    for (const auto& s : scales) {
        if (s.kx < 1 || s.ky < 1) throw error("ScanConfig: empty scale");
        if (s.kx + 2 * boundary_margin_px > n || s.ky + 2 * boundary_margin_px > n)
            throw error("ScanConfig: scale does not fit the grid with margin");
        omega(calibration, h_product(s));  // throws if the admissibility bound fails
    }
}

CorrelationEngine::CorrelationEngine(int n)
    : n_(n),
      field_spec_(spectrum_size(n)),
      stencil_spec_(spectrum_size(n)),
      embed_(std::size_t(n) * n),
      real_out_(std::size_t(n) * n) {
    if (n < 2) throw error("CorrelationEngine: grid too small");
}

void CorrelationEngine::load(const std::vector<double>& field) {
    if (field.size() != std::size_t(n_) * n_) throw error("CorrelationEngine: field size mismatch");
    std::memcpy(embed_.data(), field.data(), field.size() * sizeof(double));
    forward_r2c_2d(n_, embed_.data(), field_spec_.data());
}

void CorrelationEngine::correlate(const std::vector<double>& stencil, int kx, int ky,
                                  std::vector<double>& out) const {
    if (kx < 1 || ky < 1 || kx > n_ || ky > n_) throw error("CorrelationEngine: stencil too large");
    if (stencil.size() != std::size_t(kx) * ky) throw error("CorrelationEngine: stencil size");
    std::fill(embed_.begin(), embed_.end(), 0.0);
    for (int p = 0; p < kx; ++p)
        std::memcpy(embed_.data() + std::size_t(p) * n_, stencil.data() + std::size_t(p) * ky,
                    std::size_t(ky) * sizeof(double));
    forward_r2c_2d(n_, embed_.data(), stencil_spec_.data());
    const std::size_t m = spectrum_size(n_);
    for (std::size_t i = 0; i < m; ++i)
        stencil_spec_[i] = field_spec_[i] * std::conj(stencil_spec_[i]);
    inverse_c2r_2d(n_, stencil_spec_.data(), real_out_.data());
    const int nx = n_ - kx + 1, ny = n_ - ky + 1;
    out.resize(std::size_t(nx) * ny);
    for (int ix = 0; ix < nx; ++ix)
        std::memcpy(out.data() + std::size_t(ix) * ny, real_out_.data() + std::size_t(ix) * n_,
                    std::size_t(ny) * sizeof(double));
}

namespace {

StatField make_field(int n, int kx, int ky, int margin) {
    StatField f;
    f.kx = kx;
    f.ky = ky;
    f.x0 = margin;
    f.y0 = margin;
    f.nx = n - kx + 1 - 2 * margin;
    f.ny = n - ky + 1 - 2 * margin;
    if (f.nx < 1 || f.ny < 1) throw error("scan: no admissible positions for scale");
    f.values.resize(std::size_t(f.nx) * f.ny);
    return f;
}

// copy the margin-trimmed window out of a full valid-region correlation
void trim_into(const std::vector<double>& full, int n, int kx, int ky, StatField& f) {
    const int fny = n - ky + 1;
    for (int ix = 0; ix < f.nx; ++ix) {
        const double* src = full.data() + std::size_t(ix + f.x0) * fny + f.y0;
        std::copy(src, src + f.ny, f.values.begin() + std::size_t(ix) * f.ny);
    }
}

std::vector<double> squared_stencil(const DictionaryElement& el) {
    std::vector<double> sq(el.stencil.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = el.stencil[i] * el.stencil[i];
    return sq;
}

}  // namespace

StatField empirical_coefficients(const GridSignal& Y, const DictionaryElement& element,
                                 int margin) {
    if (Y.d != 2) throw error("empirical_coefficients: d=2 only");
    if (Y.n != element.n) throw error("empirical_coefficients: grid size mismatch");
    CorrelationEngine eng(Y.n);
    eng.load(Y.values);
    std::vector<double> full;
    eng.correlate(element.stencil, element.kx, element.ky, full);
    StatField f = make_field(Y.n, element.kx, element.ky, margin);
    trim_into(full, Y.n, element.kx, element.ky, f);
    const double inv_nd = 1.0 / (double(Y.n) * double(Y.n));
    for (double& v : f.values) v *= inv_nd;
    return f;
}

StatField local_variances(const GridSignal& var_field, const DictionaryElement& element,
                          int margin) {
    if (var_field.d != 2) throw error("local_variances: d=2 only");
    if (var_field.n != element.n) throw error("local_variances: grid size mismatch");
    for (double v : var_field.values)
        if (!(v > 0.0)) throw error("local_variances: variance field must be positive");
    CorrelationEngine eng(var_field.n);
    eng.load(var_field.values);
    std::vector<double> full;
    eng.correlate(squared_stencil(element), element.kx, element.ky, full);
    StatField f = make_field(var_field.n, element.kx, element.ky, margin);
    trim_into(full, var_field.n, element.kx, element.ky, f);
    const double nd = double(var_field.n) * double(var_field.n);
    const double inv = 1.0 / (nd * nd);
    for (double& v : f.values) {
        if (!(v > 0.0)) throw error("local_variances: nonpositive local variance");
        v = std::sqrt(v * inv);
    }
    return f;
}

namespace {

// integral image of (value != 0) indicators, for zero-box pruning
std::vector<double> nonzero_prefix(const GridSignal& Y) {
    const int n = Y.n;
    std::vector<double> P(std::size_t(n + 1) * (n + 1), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double ind = (Y.at(i, j) != 0.0) ? 1.0 : 0.0;
            P[std::size_t(i + 1) * (n + 1) + (j + 1)] = ind + P[std::size_t(i) * (n + 1) + (j + 1)] +
                                                        P[std::size_t(i + 1) * (n + 1) + j] -
                                                        P[std::size_t(i) * (n + 1) + j];
        }
    return P;
}

inline double box_sum(const std::vector<double>& P, int n, int tx, int ty, int kx, int ky) {
    return P[std::size_t(tx + kx) * (n + 1) + (ty + ky)] - P[std::size_t(tx) * (n + 1) + (ty + ky)] -
           P[std::size_t(tx + kx) * (n + 1) + ty] + P[std::size_t(tx) * (n + 1) + ty];
}

struct ScaleScan {
    StatField coef, sigma, stat;
};

ScaleScan scan_one_scale(const CorrelationEngine& engY, const CorrelationEngine& engV,
                         const GridSignal& Y, const ScanConfig& config,
                         const DictionaryElement& el, const std::vector<double>* nz_prefix) {
    const int n = config.n;
    const double w = omega(config.calibration, config.h_product({el.kx, el.ky}));
    std::vector<double> fullC, fullV;
    engY.correlate(el.stencil, el.kx, el.ky, fullC);
    engV.correlate(squared_stencil(el), el.kx, el.ky, fullV);

    ScaleScan out;
    out.coef = make_field(n, el.kx, el.ky, config.boundary_margin_px);
    out.sigma = make_field(n, el.kx, el.ky, config.boundary_margin_px);
    out.stat = make_field(n, el.kx, el.ky, config.boundary_margin_px);
    trim_into(fullC, n, el.kx, el.ky, out.coef);
    trim_into(fullV, n, el.kx, el.ky, out.sigma);

    const double nd = double(n) * double(n);
    const double inv_nd = 1.0 / nd;
    const double inv_n2d = inv_nd * inv_nd;
    for (std::size_t i = 0; i < out.coef.values.size(); ++i) {
        out.coef.values[i] *= inv_nd;
        double v2 = out.sigma.values[i] * inv_n2d;
        if (!(v2 > 0.0)) throw error("scan: nonpositive local variance");
        out.sigma.values[i] = std::sqrt(v2);
        double z = out.coef.values[i] / out.sigma.values[i];
        if (config.two_sided) z = std::fabs(z);
        out.stat.values[i] = w * (z - w);
    }
    if (nz_prefix) {
        for (int ix = 0; ix < out.stat.nx; ++ix)
            for (int iy = 0; iy < out.stat.ny; ++iy) {
                int tx = ix + out.stat.x0, ty = iy + out.stat.y0;
                if (box_sum(*nz_prefix, n, tx, ty, el.kx, el.ky) == 0.0)
                    out.stat.values[std::size_t(ix) * out.stat.ny + iy] =
                        -std::numeric_limits<double>::infinity();
            }
    }
    (void)Y;
    return out;
}

}  // namespace

LocalStatistics scan_statistic(const GridSignal& Y, const GridSignal& var_field,
                               const ScanConfig& config,
                               const std::vector<DictionaryElement>& dict) {
    config.validate();
    if (Y.n != config.n || var_field.n != config.n) throw error("scan_statistic: size mismatch");
    if (dict.size() != config.scales.size()) throw error("scan_statistic: dictionary mismatch");
    for (double v : var_field.values)
        if (!(v > 0.0)) throw error("scan_statistic: variance field must be positive");

    CorrelationEngine engY(config.n), engV(config.n);
    engY.load(Y.values);
    engV.load(var_field.values);
    std::vector<double> nz;
    if (config.prune_zero_boxes) nz = nonzero_prefix(Y);

    LocalStatistics out;
    out.max_statistic = -std::numeric_limits<double>::infinity();
    for (std::size_t si = 0; si < dict.size(); ++si) {
        if (dict[si].kx != config.scales[si].kx || dict[si].ky != config.scales[si].ky)
            throw error("scan_statistic: dictionary order differs from config.scales");
        ScaleScan sc = scan_one_scale(engY, engV, Y, config, dict[si],
                                      config.prune_zero_boxes ? &nz : nullptr);
        for (double v : sc.stat.values) out.max_statistic = std::max(out.max_statistic, v);
        out.coefficients.push_back(std::move(sc.coef));
        out.sigmas.push_back(std::move(sc.sigma));
        out.stats.push_back(std::move(sc.stat));
    }
    return out;
}

ScanResult scan_reject(const GridSignal& Y, const GridSignal& var_field, const ScanConfig& config,
                       const std::vector<DictionaryElement>& dict,
                       std::optional<double> quantile) {
    config.validate();
    if (Y.n != config.n || var_field.n != config.n) throw error("scan_reject: size mismatch");
    if (dict.size() != config.scales.size()) throw error("scan_reject: dictionary mismatch");
    for (double v : var_field.values)
        if (!(v > 0.0)) throw error("scan_reject: variance field must be positive");

    CorrelationEngine engY(config.n), engV(config.n);
    engY.load(Y.values);
    engV.load(var_field.values);
    std::vector<double> nz;
    if (config.prune_zero_boxes) nz = nonzero_prefix(Y);

    ScanResult res;
    res.max_statistic = -std::numeric_limits<double>::infinity();
    res.quantile_used = quantile.value_or(std::numeric_limits<double>::quiet_NaN());
    for (std::size_t si = 0; si < dict.size(); ++si) {
        if (dict[si].kx != config.scales[si].kx || dict[si].ky != config.scales[si].ky)
            throw error("scan_reject: dictionary order differs from config.scales");
        ScaleScan sc = scan_one_scale(engY, engV, Y, config, dict[si],
                                      config.prune_zero_boxes ? &nz : nullptr);
        const StatField& st = sc.stat;
        for (int ix = 0; ix < st.nx; ++ix)
            for (int iy = 0; iy < st.ny; ++iy) {
                double v = st.at(ix, iy);
                res.max_statistic = std::max(res.max_statistic, v);
                if (quantile && v > *quantile)
                    res.rejections.push_back(
                        {ix + st.x0, iy + st.y0, st.kx, st.ky, v});
            }
    }
    return res;
}

ScanResult reject_set(const LocalStatistics& stats, double q) {
    ScanResult res;
    res.max_statistic = stats.max_statistic;
    res.quantile_used = q;
    for (const auto& st : stats.stats)
        for (int ix = 0; ix < st.nx; ++ix)
            for (int iy = 0; iy < st.ny; ++iy)
                if (st.at(ix, iy) > q)
                    res.rejections.push_back({ix + st.x0, iy + st.y0, st.kx, st.ky, st.at(ix, iy)});
    return res;
}

GridSignal significance_map(const ScanResult& result, int n) {
    GridSignal map = GridSignal::zeros(2, n);
    std::fill(map.values.begin(), map.values.end(), -1.0);
    for (const auto& r : result.rejections) {
        const double area = double(r.kx) * double(r.ky);
        for (int ix = r.tx; ix < r.tx + r.kx; ++ix)
            for (int iy = r.ty; iy < r.ty + r.ky; ++iy) {
                double& cell = map.at(ix, iy);
                if (cell < 0.0 || area < cell) cell = area;
            }
    }
    return map;
}

double direct_ds_statistic(const GridSignal& Y, const std::vector<Scale>& scales) {
    if (Y.d != 2) throw error("direct_ds_statistic: d=2 only");
    const int n = Y.n;
    std::vector<double> P(std::size_t(n + 1) * (n + 1), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            P[std::size_t(i + 1) * (n + 1) + (j + 1)] = Y.at(i, j) +
                                                        P[std::size_t(i) * (n + 1) + (j + 1)] +
                                                        P[std::size_t(i + 1) * (n + 1) + j] -
                                                        P[std::size_t(i) * (n + 1) + j];
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& s : scales) {
        if (s.kx > n || s.ky > n) throw error("direct_ds_statistic: scale too large");
        const double h1 = double(s.kx) * double(s.ky) / (double(n) * double(n));
        const double lg = std::log(3.0 / h1);
        if (!(lg > 1.0)) throw error("direct_ds_statistic: scale too large for the double log");
        const double pen = std::sqrt(lg) / std::log(lg);
        const double shift = std::sqrt(2.0 * lg);
        const double inv_norm = 1.0 / std::sqrt(double(s.kx) * double(s.ky));
        for (int tx = 0; tx + s.kx <= n; ++tx)
            for (int ty = 0; ty + s.ky <= n; ++ty) {
                double B = box_sum(P, n, tx, ty, s.kx, s.ky) * inv_norm;
                best = std::max(best, pen * (B - shift));
            }
    }
    return best;
}

double detection_threshold_sigma(const DictionaryElement& element, double q, double omega_i,
                                 int n) {
    if (!(q > 0.0) || !(omega_i > 0.0) || n < 2)
        throw error("detection_threshold_sigma: positive inputs required");
    const double h1 = double(element.kx) / double(n), h2 = double(element.ky) / double(n);
    const double nd = double(n) * double(n);
    return std::sqrt(h1 * h2 * nd) / element.l2_norm / (2.0 * (q / omega_i + omega_i));
}

double oracle_power(double mu, double sigma_at_tstar, double h_star_product, double alpha,
                    double q) {
    if (!(h_star_product > 0.0 && h_star_product < 1.0))
        throw error("oracle_power: h product outside (0,1)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw error("oracle_power: alpha outside (0,1)");
    if (!(sigma_at_tstar > 0.0)) throw error("oracle_power: sigma must be positive");
    (void)q;
    const double arg = std::sqrt(2.0 * std::log(1.0 / h_star_product)) - mu / sigma_at_tstar;
    const double tail = 0.5 * std::erfc(arg / std::sqrt(2.0));
    return alpha + (1.0 - alpha) * tail;
}

std::vector<Rejection> large_components(const GridSignal& f, const GridSignal& var_field,
                                        const ScanConfig& config,
                                        const std::vector<DictionaryElement>& dict,
                                        const TensorProbe& probe, double q) {
    config.validate();
    if (f.n != config.n || var_field.n != config.n) throw error("large_components: size mismatch");
    CorrelationEngine engF(config.n), engV(config.n);
    engF.load(f.values);
    engV.load(var_field.values);

    std::vector<Rejection> out;
    const double nd = double(config.n) * double(config.n);
    for (std::size_t si = 0; si < dict.size(); ++si) {
        const auto& el = dict[si];
        const double w = omega(config.calibration, config.h_product({el.kx, el.ky}));
        const double bound_factor = 2.0 * (q / w + w);
        std::vector<double> probe_st;
        {
            std::vector<double> ax(std::size_t(el.kx)), ay(std::size_t(el.ky));
            for (int p = 0; p < el.kx; ++p)
                ax[std::size_t(p)] = probe.axis[0].eval((double(p) + 0.5) / double(el.kx));
            for (int p = 0; p < el.ky; ++p)
                ay[std::size_t(p)] = probe.axis[1].eval((double(p) + 0.5) / double(el.ky));
            probe_st.resize(std::size_t(el.kx) * el.ky);
            for (int p = 0; p < el.kx; ++p)
                for (int r = 0; r < el.ky; ++r)
                    probe_st[std::size_t(p) * el.ky + r] = ax[std::size_t(p)] * ay[std::size_t(r)];
        }
        std::vector<double> fullC, fullV;
        engF.correlate(probe_st, el.kx, el.ky, fullC);
        engV.correlate(squared_stencil(el), el.kx, el.ky, fullV);
        StatField coef = make_field(config.n, el.kx, el.ky, config.boundary_margin_px);
        StatField sig = make_field(config.n, el.kx, el.ky, config.boundary_margin_px);
        trim_into(fullC, config.n, el.kx, el.ky, coef);
        trim_into(fullV, config.n, el.kx, el.ky, sig);
        for (std::size_t i = 0; i < coef.values.size(); ++i) {
            double c = coef.values[i] / nd;
            double s2 = sig.values[i] / (nd * nd);
            if (!(s2 > 0.0)) throw error("large_components: nonpositive variance");
            if (c > bound_factor * std::sqrt(s2)) {
                int ix = int(i) / coef.ny, iy = int(i) % coef.ny;
                out.push_back({ix + coef.x0, iy + coef.y0, el.kx, el.ky, c});
            }
        }
    }
    return out;
}

void write_scan_csv(const ScanResult& result, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw error("write_scan_csv: cannot open " + path);
    os << "t_x_px,t_y_px,k_x_px,k_y_px,statistic\n";
    char buf[160];
    for (const auto& r : result.rejections) {
        std::snprintf(buf, sizeof buf, "%d,%d,%d,%d,%.12g\n", r.tx, r.ty, r.kx, r.ky, r.value);
        os << buf;
    }
}

}  // namespace miscat
