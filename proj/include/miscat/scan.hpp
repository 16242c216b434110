#pragma once

// Scan engine: local test statistics over (position x scale), their maximum,
// rejection sets, significance maps, and the closed-form power/detection
// helpers. Positions are box anchors: the box of scale (kx, ky) anchored at
// (tx, ty) covers pixels [tx, tx+kx-1] x [ty, ty+ky-1]; admissible anchors
// keep the box inside the grid minus the configured margin.

#include <optional>
#include <string>
#include <vector>

#include "miscat/calibration.hpp"
#include "miscat/dictionary.hpp"
#include "miscat/fft.hpp"
#include "miscat/grid.hpp"

namespace miscat {

struct Scale {
    int kx = 0;
    int ky = 0;
};

std::vector<Scale> scale_range(int kmin, int kmax, int kstep);

struct ScanConfig {
    int n = 0;
    int d = 2;
    std::vector<Scale> scales;
    CalibrationParams calibration;
    double alpha = 0.1;
    int boundary_margin_px = 0;
    bool two_sided = false;         // |coef|/sigma instead of coef/sigma
    bool prune_zero_boxes = false;  // skip boxes whose data pixels are all zero

    double h_product(const Scale& s) const {
        return double(s.kx) * double(s.ky) / (double(n) * double(n));
    }
    void validate() const;
};

// one scale's position-indexed values; anchor (x0+ix, y0+iy) maps to
// values[ix*ny + iy]
struct StatField {
    int kx = 0, ky = 0;
    int x0 = 0, y0 = 0;
    int nx = 0, ny = 0;
    std::vector<double> values;

    double at(int ix, int iy) const { return values[std::size_t(ix) * ny + iy]; }
};

struct LocalStatistics {
    std::vector<StatField> coefficients;
    std::vector<StatField> sigmas;
    std::vector<StatField> stats;
    double max_statistic = 0.0;
};

struct Rejection {
    int tx = 0, ty = 0;
    int kx = 0, ky = 0;
    double value = 0.0;
};

struct ScanResult {
    double max_statistic = 0.0;
    double quantile_used = 0.0;
    std::vector<Rejection> rejections;
};

// Shared FFT cross-correlation core. load() fixes the field; correlate()
// writes C(t) = sum_j field[t+j] stencil[j] over valid anchors t in
// [0, n-k] per axis. Scratch is reused across calls; one engine per thread.
class CorrelationEngine {
  public:
    explicit CorrelationEngine(int n);
    void load(const std::vector<double>& field);
    void correlate(const std::vector<double>& stencil, int kx, int ky,
                   std::vector<double>& out) const;
    int n() const { return n_; }

  private:
    int n_;
    CplxBuf field_spec_;
    mutable CplxBuf stencil_spec_;
    mutable RealBuf embed_;
    mutable RealBuf real_out_;
};

// n^(-d) sum_j Y_j Phi(x_j) per anchor
StatField empirical_coefficients(const GridSignal& Y, const DictionaryElement& element,
                                 int margin = 0);

// sigma_i^2 = n^(-2d) sum_j var(x_j) Phi(x_j)^2 per anchor; returns sigma_i
StatField local_variances(const GridSignal& var_field, const DictionaryElement& element,
                          int margin = 0);

// All statistics with full per-position storage. Memory grows as
// |scales| * n^2; intended for moderate configurations and tests.
LocalStatistics scan_statistic(const GridSignal& Y, const GridSignal& var_field,
                               const ScanConfig& config,
                               const std::vector<DictionaryElement>& dict);

// Streaming variant: per-scale fields are discarded after thresholding.
// Pass a quantile to collect rejections; without one only the maximum is
// computed.
ScanResult scan_reject(const GridSignal& Y, const GridSignal& var_field, const ScanConfig& config,
                       const std::vector<DictionaryElement>& dict,
                       std::optional<double> quantile);

ScanResult reject_set(const LocalStatistics& stats, double q);

// per-pixel minimum covering rejected-box area (pixel^2), -1 where uncovered
GridSignal significance_map(const ScanResult& result, int n);

// Indicator-box direct scan with the double-log calibration
//   sqrt(log(3/h^1))/log(log(3/h^1)) * [boxsum/sqrt(px) - sqrt(2 log(3/h^1))]
// over all scales and admissible anchors; Y is taken as pre-standardized.
double direct_ds_statistic(const GridSignal& Y, const std::vector<Scale>& scales);

// largest homogeneous noise level detecting a unit signal on the box with
// probability >= 1-alpha: sqrt(h1 h2 n^d) / ||Phi_h||_2 / (2 (q/omega + omega))
double detection_threshold_sigma(const DictionaryElement& element, double q, double omega_i,
                                 int n);

// alpha + (1-alpha) * UpperTail(sqrt(2 log(1/h*^1)) - mu/sigma)
double oracle_power(double mu, double sigma_at_tstar, double h_star_product, double alpha,
                    double q);

// all (anchor, scale) with <f, phi_i>_n > 2 (q/omega_i + omega_i) sigma_i,
// phi_i the plain probe stencil; guaranteed detections at quantile q
std::vector<Rejection> large_components(const GridSignal& f, const GridSignal& var_field,
                                        const ScanConfig& config,
                                        const std::vector<DictionaryElement>& dict,
                                        const TensorProbe& probe, double q);

void write_scan_csv(const ScanResult& result, const std::string& path);

}  // namespace miscat
