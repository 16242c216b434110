#pragma once

// Simulation harnesses shared by the command-line driver and the acceptance
// suite: pure-noise level studies, block-signal power studies against the
// closed-form oracle prediction, and per-scale detection-boundary curves for
// the three probe presets.

#include <cstdint>
#include <string>
#include <vector>

#include "miscat/gauss_calib.hpp"
#include "miscat/noise.hpp"
#include "miscat/scan.hpp"

namespace miscat {

struct StudySetup {
    int n = 256;
    int kmin = 2, kmax = 15, kstep = 1;  // same h set as the reference grid at half resolution
    int a = 2;
    double b = 0.0243;
    int beta = 4;  // 2a: smoothness-matched probe
    double alpha = 0.1;
    int margin = 0;
    int threads = 1;
    bool two_sided = true;  // matches the absolute-value reference statistic
    bool allow_undersmoothed = false;
    std::uint64_t seed = 20240901;
};

struct StudyContext {
    TensorProbe probe;
    ConvolutionKernelSpec kernel;
    std::vector<Scale> scales;
    std::vector<DictionaryElement> dict;
    ScanConfig config;
};

// Weight constants fitted once against the reference simulation on the
// square-scale grid; K rides on the largest h product so equal-h scale
// systems share weights across grid sizes.
CalibrationParams reference_calibration(double h_max_product, int d = 2);

StudyContext make_context(const StudySetup& setup);

// Scenario rows for the level study: homogeneous Gaussian, heavy-tailed
// Student-t (moment condition violated, expected breakdown), and the
// Poisson-plus-Gaussian photon model.
std::vector<std::pair<std::string, NoiseSpec>> default_level_scenarios();

struct LevelRow {
    std::string scenario;
    double fwer = 0.0;
    int reps = 0;
};

// Pure-noise replications per scenario; quantile is the reference threshold
// at level 1-alpha.
std::vector<LevelRow> level_study(const StudyContext& ctx,
                                  const std::vector<std::pair<std::string, NoiseSpec>>& scenarios,
                                  double quantile, int reps, std::uint64_t seed, int threads);

void write_level_csv(const std::vector<LevelRow>& rows, const std::string& path);

struct PowerRow {
    double shift = 0.0;  // standardized mean shift of the oracle-box statistic
    double single_power = 0.0;
    double multi_power = 0.0;
    double predicted = 0.0;
};

struct PowerStudyResult {
    int k_star = 0;
    double h_star = 0.0;
    double q_single = 0.0;  // self-calibrated pure-noise quantiles
    double q_multi = 0.0;
    std::vector<PowerRow> rows;
};

// Block signal mu * indicator at the oracle box; the single-scale test scans
// only the true scale, the multiscale test the full setup grid. Both tests
// are calibrated by pure-noise replications of the same pipeline
// (one-sided), so the reported powers are exact level-alpha tests; the
// prediction column is the closed-form tail formula.
PowerStudyResult power_study(const StudySetup& setup, int k_star,
                             const std::vector<double>& shifts, int reps_cal, int reps);

void write_power_csv(const PowerStudyResult& result, const std::string& path);

enum class ProbePreset { smooth_matched, oversmoothed, undersmoothed };

std::string probe_preset_name(ProbePreset preset);
int probe_preset_beta(ProbePreset preset);  // 2a, 10, 1 at a=2

struct BoundaryRow {
    std::string preset;
    int k = 0;
    double sigma_max = 0.0;
};

// Largest homogeneous noise level at which a unit box signal at each scale
// is still detected with probability >= 1-alpha, per probe preset; elements
// are normalized to unit mother-probe L2 norm so presets are comparable.
std::vector<BoundaryRow> detection_boundary_study(const StudySetup& setup, int reps_cal);

void write_boundary_csv(const std::vector<BoundaryRow>& rows, const std::string& path);

}  // namespace miscat
