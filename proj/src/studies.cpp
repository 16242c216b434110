#include "miscat/studies.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <thread>

#include "miscat/calibration.hpp"
#include "miscat/property.hpp"

namespace miscat {

namespace {

// Fitted against 10^4 reference replications of the n=512, k=4..30 square
// grid jointly with the half-resolution smoke grid; see reference_calibration.
constexpr double kRefCd = 5.75;
constexpr double kRefKOverHmax = 4.30;

// Replication loop with a shared index dispenser; results keyed by rep so
// the outcome is independent of the thread count.
void run_reps(int reps, int threads, const std::function<double(int)>& fn,
              std::vector<double>& out) {
    out.assign(std::size_t(reps), 0.0);
    threads = std::max(1, threads);
    if (threads == 1) {
        for (int r = 0; r < reps; ++r) out[std::size_t(r)] = fn(r);
        return;
    }
    std::mutex mtx;
    int next = 0;
    auto worker = [&]() {
        for (;;) {
            int r;
            {
                std::lock_guard<std::mutex> lk(mtx);
                if (next >= reps) return;
                r = next++;
            }
            out[std::size_t(r)] = fn(r);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace

CalibrationParams reference_calibration(double h_max_product, int d) {
    if (!(h_max_product > 0.0 && h_max_product < 1.0))
        throw error("reference_calibration: h product outside (0,1)");
    CalibrationParams p;
    p.K = kRefKOverHmax * h_max_product;
    p.C_d = kRefCd;
    p.gamma = 1.0;
    p.d = d;
    return p;
}

StudyContext make_context(const StudySetup& setup) {
    StudyContext ctx;
    ctx.probe = make_probe(2, setup.beta);
    ctx.kernel = ConvolutionKernelSpec{2, setup.a, setup.b};
    ctx.scales = scale_range(setup.kmin, setup.kmax, setup.kstep);
    std::vector<std::pair<int, int>> px;
    for (const Scale& s : ctx.scales) px.emplace_back(s.kx, s.ky);
    ctx.dict = build_dictionary(ctx.probe, ctx.kernel, px, setup.n, setup.allow_undersmoothed);

    double h_max = double(setup.kmax) / setup.n * double(setup.kmax) / setup.n;
    ctx.config.n = setup.n;
    ctx.config.d = 2;
    ctx.config.scales = ctx.scales;
    ctx.config.calibration = reference_calibration(h_max);
    ctx.config.alpha = setup.alpha;
    ctx.config.boundary_margin_px = setup.margin;
    ctx.config.two_sided = setup.two_sided;
    ctx.config.validate();
    return ctx;
}

std::vector<std::pair<std::string, NoiseSpec>> default_level_scenarios() {
    NoiseSpec gauss;
    gauss.kind = NoiseKind::gaussian;
    gauss.sigma = 1.0;
    NoiseSpec student;
    student.kind = NoiseKind::student_t;
    student.nu = 3;
    NoiseSpec photon;
    photon.kind = NoiseKind::poisson_gauss;
    photon.t = 1000.0;
    photon.background = 0.005;
    photon.sigma = 0.01;
    return {{"gaussian", gauss}, {"student_t3", student}, {"poisson_gauss", photon}};
}

std::vector<LevelRow> level_study(const StudyContext& ctx,
                                  const std::vector<std::pair<std::string, NoiseSpec>>& scenarios,
                                  double quantile, int reps, std::uint64_t seed, int threads) {
    std::vector<LevelRow> rows;
    std::uint64_t scenario_seed = seed;
    for (const auto& [name, spec] : scenarios) {
        PropertyReport rep =
            check_fwer(ctx.config, ctx.dict, spec, quantile, reps, scenario_seed, threads);
        rows.push_back({name, rep.value, reps});
        scenario_seed += 0x100003;
    }
    return rows;
}

void write_level_csv(const std::vector<LevelRow>& rows, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw error("cannot open " + path);
    std::fprintf(f, "scenario,fwer,reps\n");
    for (const auto& r : rows)
        std::fprintf(f, "%s,%.12g,%d\n", r.scenario.c_str(), r.fwer, r.reps);
    std::fclose(f);
}

PowerStudyResult power_study(const StudySetup& setup, int k_star,
                             const std::vector<double>& shifts, int reps_cal, int reps) {
    if (k_star < 2 || k_star > setup.n / 2) throw error("power_study: oracle scale out of range");
    if (shifts.empty()) throw error("power_study: empty shift sweep");

    const int n = setup.n;
    const double h_star = double(k_star) / n * double(k_star) / n;

    // One-sided tests: the block signal is positive and the closed-form
    // prediction is a one-sided tail.
    StudySetup multi_setup = setup;
    multi_setup.two_sided = false;
    StudyContext multi = make_context(multi_setup);
    multi.config.calibration.C_d = select_Cd(ScaleSystem::dense_full, 2, 1.0);

    StudySetup single_setup = setup;
    single_setup.two_sided = false;
    single_setup.kmin = single_setup.kmax = k_star;
    single_setup.kstep = 1;
    StudyContext single = make_context(single_setup);
    single.config.calibration = reference_calibration(h_star);
    single.config.calibration.C_d = select_Cd(ScaleSystem::single_scale, 2, 1.0);

    NoiseSpec noise;
    noise.kind = NoiseKind::gaussian;
    noise.sigma = 1.0;
    GridSignal zero = GridSignal::zeros(2, n);
    GridSignal var_field = variance_truth(noise, zero);

    // Self-calibration: pure-noise quantiles of both pipelines.
    const std::uint64_t cal_seed = setup.seed ^ 0x517cc1b727220a95ULL;
    std::vector<double> cal_draws;
    auto null_draw = [&](const StudyContext& ctx) {
        return [&ctx, &zero, &var_field, &noise, cal_seed](int rep) {
            GridSignal y = generate(zero, noise, cal_seed, uint32_t(rep));
            return scan_reject(y, var_field, ctx.config, ctx.dict, std::nullopt).max_statistic;
        };
    };
    run_reps(reps_cal, setup.threads, null_draw(single), cal_draws);
    const double q_single = empirical_quantile(cal_draws, 1.0 - setup.alpha);
    run_reps(reps_cal, setup.threads, null_draw(multi), cal_draws);
    const double q_multi = empirical_quantile(cal_draws, 1.0 - setup.alpha);

    // Standardized shift of the oracle-box statistic for a unit-amplitude
    // block, from the exact pipeline mean (model is linear in the truth).
    const int t_star = (n - k_star) / 2;
    GridSignal unit_block = GridSignal::zeros(2, n);
    for (int ix = 0; ix < k_star; ++ix)
        for (int iy = 0; iy < k_star; ++iy) unit_block.at(t_star + ix, t_star + iy) = 1.0;
    GridSignal unit_mean = convolve(multi.kernel, unit_block);
    const DictionaryElement& el_star = single.dict.at(0);
    StatField coef = empirical_coefficients(unit_mean, el_star, setup.margin);
    StatField sig = local_variances(var_field, el_star, setup.margin);
    const double unit_shift =
        coef.at(t_star - coef.x0, t_star - coef.y0) / sig.at(t_star - sig.x0, t_star - sig.y0);
    if (!(unit_shift > 0.0)) throw error("power_study: degenerate oracle coefficient");

    PowerStudyResult result;
    result.k_star = k_star;
    result.h_star = h_star;
    result.q_single = q_single;
    result.q_multi = q_multi;

    const std::uint64_t power_seed = setup.seed ^ 0x2545f4914f6cdd1dULL;
    std::vector<double> stat_single, stat_multi;
    for (double m : shifts) {
        GridSignal mean = GridSignal::zeros(2, n);
        const double amplitude = m / unit_shift;
        for (std::size_t j = 0; j < mean.values.size(); ++j)
            mean.values[j] = amplitude * unit_mean.values[j];

        // Shared noise draws across the sweep and between the two tests:
        // paired comparison tightens the multiscale-vs-single contrast.
        auto signal_draw = [&](const StudyContext& ctx) {
            return [&ctx, &mean, &var_field, &noise, power_seed](int rep) {
                GridSignal y = generate(mean, noise, power_seed, uint32_t(rep));
                return scan_reject(y, var_field, ctx.config, ctx.dict, std::nullopt).max_statistic;
            };
        };
        run_reps(reps, setup.threads, signal_draw(single), stat_single);
        run_reps(reps, setup.threads, signal_draw(multi), stat_multi);

        PowerRow row;
        row.shift = m;
        for (int r = 0; r < reps; ++r) {
            row.single_power += stat_single[std::size_t(r)] > q_single ? 1.0 : 0.0;
            row.multi_power += stat_multi[std::size_t(r)] > q_multi ? 1.0 : 0.0;
        }
        row.single_power /= reps;
        row.multi_power /= reps;
        row.predicted = oracle_power(m, 1.0, h_star, setup.alpha, q_single);
        result.rows.push_back(row);
    }
    return result;
}

void write_power_csv(const PowerStudyResult& result, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw error("cannot open " + path);
    std::fprintf(f, "# k_star=%d h_star=%.12g q_single=%.12g q_multi=%.12g\n", result.k_star,
                 result.h_star, result.q_single, result.q_multi);
    std::fprintf(f, "shift,single_power,multi_power,predicted\n");
    for (const auto& r : result.rows)
        std::fprintf(f, "%.12g,%.12g,%.12g,%.12g\n", r.shift, r.single_power, r.multi_power,
                     r.predicted);
    std::fclose(f);
}

std::string probe_preset_name(ProbePreset preset) {
    switch (preset) {
        case ProbePreset::smooth_matched: return "smooth_matched";
        case ProbePreset::oversmoothed: return "oversmoothed";
        case ProbePreset::undersmoothed: return "undersmoothed";
    }
    throw error("unknown probe preset");
}

int probe_preset_beta(ProbePreset preset) {
    switch (preset) {
        case ProbePreset::smooth_matched: return 4;
        case ProbePreset::oversmoothed: return 10;
        case ProbePreset::undersmoothed: return 1;
    }
    throw error("unknown probe preset");
}

std::vector<BoundaryRow> detection_boundary_study(const StudySetup& setup, int reps_cal) {
    std::vector<BoundaryRow> rows;
    for (ProbePreset preset : {ProbePreset::smooth_matched, ProbePreset::oversmoothed,
                               ProbePreset::undersmoothed}) {
        StudySetup s = setup;
        s.beta = probe_preset_beta(preset);
        s.allow_undersmoothed = s.beta < 2 * s.a;
        StudyContext ctx = make_context(s);

        // Comparable curves need a common probe normalization; rescale every
        // element to unit mother-probe L2 norm (the scan statistic itself is
        // amplitude-invariant, so the quantile is unaffected).
        const double mother_norm = probe_l2_norm(ctx.probe);
        for (DictionaryElement& el : ctx.dict) {
            for (double& v : el.stencil) v /= mother_norm;
            el.norm_pixel /= mother_norm;
            el.l2_norm /= mother_norm;
            el.l1_norm /= mother_norm;
        }

        QuantileTable table = quantile_table(ctx.config, ctx.dict, reps_cal,
                                             {1.0 - setup.alpha}, setup.seed, setup.threads);
        const double q = table.quantiles.at(0);
        for (std::size_t i = 0; i < ctx.scales.size(); ++i) {
            double h1 = ctx.config.h_product(ctx.scales[i]);
            double w = omega(ctx.config.calibration, h1);
            BoundaryRow row;
            row.preset = probe_preset_name(preset);
            row.k = ctx.scales[i].kx;
            row.sigma_max = detection_threshold_sigma(ctx.dict[i], q, w, setup.n);
            rows.push_back(row);
        }
    }
    return rows;
}

void write_boundary_csv(const std::vector<BoundaryRow>& rows, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw error("cannot open " + path);
    std::fprintf(f, "preset,k,sigma_max\n");
    for (const auto& r : rows)
        std::fprintf(f, "%s,%d,%.12g\n", r.preset.c_str(), r.k, r.sigma_max);
    std::fclose(f);
}

}  // namespace miscat
