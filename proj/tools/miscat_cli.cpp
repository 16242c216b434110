// Command-line driver: data generation, reference-quantile simulation with
// caching, scanning with significance maps, and the level / power /
// detection-boundary studies. Every command is deterministic given its
// resolved key=value configuration.
//
// Exit codes: 0 success (scan: at least one rejection), 10 scan found
// nothing, 1 any error.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "miscat/calibration.hpp"
#include "miscat/config.hpp"
#include "miscat/gauss_calib.hpp"
#include "miscat/kernel.hpp"
#include "miscat/noise.hpp"
#include "miscat/property.hpp"
#include "miscat/scan.hpp"
#include "miscat/studies.hpp"

namespace {

using namespace miscat;

// Resolution order: built-in defaults, then --config file, then --set
// overrides, then direct flags.
struct ParamSource {
    std::string config_path;
    std::vector<std::string> sets;
    std::vector<std::string> flags;

    KeyValueConfig resolve(KeyValueConfig defaults) const {
        if (!config_path.empty()) {
            KeyValueConfig file = parse_config_file(config_path);
            for (const auto& [k, v] : file.entries) defaults.set(k, v);
        }
        apply_overrides(defaults, sets);
        apply_overrides(defaults, flags);
        return defaults;
    }
};

void attach_common(CLI::App* cmd, ParamSource& src) {
    cmd->add_option("--config", src.config_path, "key=value configuration file");
    cmd->add_option("--set", src.sets, "override: key=value (repeatable)")
        ->take_all();
    auto flag = [&src, cmd](const std::string& names, const std::string& key,
                            const std::string& help) {
        cmd->add_option_function<std::string>(
            names, [&src, key](const std::string& v) { src.flags.push_back(key + "=" + v); },
            help);
    };
    flag("-n,--grid", "n", "grid size per axis (power of two)");
    flag("--seed", "seed", "master seed");
    flag("--threads", "threads", "worker thread cap");
    flag("--reps", "reps", "replication count");
    flag("--alpha", "alpha", "test level");
    flag("--out", "out", "output path or prefix");
}

KeyValueConfig base_defaults() {
    KeyValueConfig d;
    d.set("n", "256");
    d.set("kmin", "2");
    d.set("kmax", "15");
    d.set("kstep", "1");
    d.set("a", "2");
    d.set("b", "0.0243");
    d.set("beta", "4");
    d.set("alpha", "0.1");
    d.set("seed", "20240901");
    d.set("threads", "1");
    d.set("margin", "0");
    d.set("two_sided", "true");
    return d;
}

int require_pow2_n(const KeyValueConfig& cfg) {
    int n = cfg.get_int("n", 256);
    if (n < 64 || n > 2048 || (n & (n - 1)) != 0)
        throw error("n must be a power of two in [64, 2048]");
    return n;
}

StudySetup setup_from(const KeyValueConfig& cfg) {
    StudySetup s;
    s.n = require_pow2_n(cfg);
    s.kmin = cfg.get_int("kmin", s.kmin);
    s.kmax = cfg.get_int("kmax", s.kmax);
    s.kstep = cfg.get_int("kstep", s.kstep);
    s.a = cfg.get_int("a", s.a);
    s.b = cfg.get_double("b", s.b);
    s.beta = cfg.get_int("beta", s.beta);
    s.alpha = cfg.get_double("alpha", s.alpha);
    s.margin = cfg.get_int("margin", s.margin);
    s.threads = cfg.get_int("threads", s.threads);
    s.two_sided = cfg.get_bool("two_sided", s.two_sided);
    s.allow_undersmoothed = cfg.get_bool("allow_undersmoothed", false);
    s.seed = std::uint64_t(cfg.get_double("seed", double(s.seed)));
    return s;
}

NoiseSpec noise_from(const KeyValueConfig& cfg) {
    NoiseSpec spec;
    spec.kind = noise_kind_from_string(cfg.get("noise.kind", "gaussian"));
    spec.sigma = cfg.get_double("noise.sigma", 0.05);
    spec.nu = cfg.get_int("noise.nu", 3);
    spec.t = cfg.get_double("noise.t", 1000.0);
    spec.background = cfg.get_double("noise.background", 0.0);
    spec.validate();
    return spec;
}

// The paper-scale grid: n=512, squares 4..30 step 2, 10^4 replications.
void apply_paper_scale(KeyValueConfig& cfg) {
    cfg.set("n", "512");
    cfg.set("kmin", "4");
    cfg.set("kmax", "30");
    cfg.set("kstep", "2");
    cfg.set("reps", "10000");
    std::fprintf(stderr,
                 "warning: paper-scale configuration (n=512, reps=10000); "
                 "expect a long multi-threaded run\n");
}

std::vector<double> quantile_levels() { return {0.1, 0.5, 0.8, 0.9, 0.95, 0.99}; }

int cmd_gen_data(const KeyValueConfig& cfg) {
    StudySetup s = setup_from(cfg);
    NoiseSpec spec = noise_from(cfg);
    PhantomKind kind = phantom_kind_from_string(cfg.get("phantom", "circles_squares_lines"));
    std::string prefix = cfg.get("out", "miscat_");

    GridSignal truth = phantom(kind, s.n);
    ConvolutionKernelSpec kernel{2, s.a, s.b};
    GridSignal convolved = convolve(kernel, truth);
    GridSignal data = generate(convolved, spec, s.seed);
    GridSignal variance = variance_truth(spec, convolved);

    std::string meta = "phantom=" + cfg.get("phantom", "circles_squares_lines") +
                       " noise=" + noise_kind_to_string(spec.kind);
    write_pgrid(prefix + "truth.pgrid", truth, meta);
    write_pgrid(prefix + "convolved.pgrid", convolved, meta);
    write_pgrid(prefix + "data.pgrid", data, meta);
    write_pgrid(prefix + "variance.pgrid", variance, meta);
    std::printf("wrote %struth.pgrid, %sconvolved.pgrid, %sdata.pgrid, %svariance.pgrid\n",
                prefix.c_str(), prefix.c_str(), prefix.c_str(), prefix.c_str());
    return 0;
}

int cmd_quantiles(const KeyValueConfig& cfg) {
    StudySetup s = setup_from(cfg);
    StudyContext ctx = make_context(s);
    int reps = cfg.get_int("reps", 2000);
    std::string out = cfg.get("out", "quantiles.csv");

    QuantileTable table;
    const char* cache_dir = std::getenv("MISCAT_CACHE_DIR");
    if (cache_dir && *cache_dir) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%016llx_%d.csv",
                      (unsigned long long)config_fingerprint(ctx.config, ctx.dict), reps);
        std::string cache_path = std::string(cache_dir) + "/" + buf;
        table = quantile_table_cached(ctx.config, ctx.dict, reps, quantile_levels(), s.seed,
                                      s.threads, cache_path);
    } else {
        table = quantile_table(ctx.config, ctx.dict, reps, quantile_levels(), s.seed, s.threads);
    }
    write_quantile_csv(table, out);
    for (std::size_t i = 0; i < table.levels.size(); ++i)
        std::printf("level %.2f  quantile %.6f\n", table.levels[i], table.quantiles[i]);
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

int cmd_scan(const KeyValueConfig& cfg) {
    StudySetup s = setup_from(cfg);
    StudyContext ctx = make_context(s);
    GridSignal data = read_pgrid(cfg.require("data"));
    GridSignal variance = read_pgrid(cfg.require("variance"));
    if (data.n != s.n || variance.n != s.n)
        throw error("data/variance grid size does not match configured n");

    QuantileTable table = read_quantile_csv(cfg.require("quantiles"));
    if (table.fingerprint != config_fingerprint(ctx.config, ctx.dict))
        throw error("quantile table fingerprint does not match the scan configuration");
    double level = 1.0 - s.alpha;
    double q = 0.0;
    bool found = false;
    for (std::size_t i = 0; i < table.levels.size(); ++i) {
        if (std::abs(table.levels[i] - level) < 1e-9) {
            q = table.quantiles[i];
            found = true;
        }
    }
    if (!found) throw error("quantile table lacks the level matching alpha");

    ScanResult result = scan_reject(data, variance, ctx.config, ctx.dict, q);
    std::string prefix = cfg.get("out", "scan_");
    write_scan_csv(result, prefix + "rejections.csv");
    GridSignal map = significance_map(result, s.n);
    write_pgrid(prefix + "significance.pgrid", map, "significance map");
    std::printf("max statistic %.6f, threshold %.6f, rejections %zu\n", result.max_statistic, q,
                result.rejections.size());
    std::printf("wrote %srejections.csv, %ssignificance.pgrid\n", prefix.c_str(), prefix.c_str());
    return result.rejections.empty() ? 10 : 0;
}

int cmd_level_study(const KeyValueConfig& cfg) {
    StudySetup s = setup_from(cfg);
    StudyContext ctx = make_context(s);
    int reps = cfg.get_int("reps", 500);
    int reps_cal = cfg.get_int("reps_cal", 2000);
    QuantileTable table =
        quantile_table(ctx.config, ctx.dict, reps_cal, {1.0 - s.alpha}, s.seed + 1, s.threads);
    std::vector<LevelRow> rows =
        level_study(ctx, default_level_scenarios(), table.quantiles.at(0), reps, s.seed, s.threads);
    std::string out = cfg.get("out", "level_study.csv");
    write_level_csv(rows, out);
    for (const auto& r : rows)
        std::printf("%-14s fwer %.4f  (%d reps)\n", r.scenario.c_str(), r.fwer, r.reps);
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

int cmd_power_study(const KeyValueConfig& cfg) {
    StudySetup s = setup_from(cfg);
    int k_star = cfg.get_int("k_star", 12);
    int reps = cfg.get_int("reps", 2000);
    int reps_cal = cfg.get_int("reps_cal", 2000);
    std::vector<double> shifts;
    {
        std::string spec = cfg.get("shifts", "");
        if (spec.empty()) {
            double s0 = std::sqrt(2.0 * std::log(1.0 / (double(k_star) * k_star /
                                                        (double(s.n) * s.n))));
            shifts = {0.0, s0 - 2.0, s0 + 1.0, s0 + 2.0, s0 + 3.0};
        } else {
            std::size_t pos = 0;
            while (pos < spec.size()) {
                std::size_t next = spec.find(',', pos);
                if (next == std::string::npos) next = spec.size();
                shifts.push_back(std::stod(spec.substr(pos, next - pos)));
                pos = next + 1;
            }
        }
    }
    PowerStudyResult result = power_study(s, k_star, shifts, reps_cal, reps);
    std::string out = cfg.get("out", "power_study.csv");
    write_power_csv(result, out);
    std::printf("oracle scale %d px (h1=%.3g), q_single %.4f, q_multi %.4f\n", result.k_star,
                result.h_star, result.q_single, result.q_multi);
    for (const auto& r : result.rows)
        std::printf("shift %6.3f  single %.4f  multi %.4f  predicted %.4f\n", r.shift,
                    r.single_power, r.multi_power, r.predicted);
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

int cmd_detection_boundary(const KeyValueConfig& cfg) {
    StudySetup s = setup_from(cfg);
    int reps_cal = cfg.get_int("reps_cal", 500);
    std::vector<BoundaryRow> rows = detection_boundary_study(s, reps_cal);
    std::string out = cfg.get("out", "detection_boundary.csv");
    write_boundary_csv(rows, out);
    for (const auto& r : rows)
        std::printf("%-15s k=%2d  sigma_max %.6g\n", r.preset.c_str(), r.k, r.sigma_max);
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

int cmd_fwhm(const KeyValueConfig& cfg) {
    // spread report has no scan stage; any FFT-capable grid size is fine
    int n = cfg.get_int("n", 256);
    if (n < 16 || n > 4096) throw error("n out of range for the spread report");
    double px = cfg.get_double("pixel_size", 1.0);
    double gaussian_sigma = cfg.get_double("gaussian_sigma", 0.0);
    if (gaussian_sigma > 0.0) {
        double w = 2.0 * std::sqrt(2.0 * std::log(2.0)) * gaussian_sigma;
        std::printf("gaussian sigma %.6g -> fwhm %.6f (analytic)\n", gaussian_sigma, w);
        return 0;
    }
    ConvolutionKernelSpec kernel{2, cfg.get_int("a", 2), cfg.get_double("b", 0.0243)};
    double w = fwhm(kernel, n, px);
    double kur = kurtosis(kernel, n);
    std::printf("kernel a=%d b=%.6g at n=%d:\n", kernel.a, kernel.b, n);
    std::printf("  fwhm %.6f px", w / px);
    if (px != 1.0) std::printf("  (%.6f physical units at pixel size %g)", w, px);
    std::printf("\n  moment ratio %.6f\n", kur);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multiscale scanning tests for convolved image data"};
    app.require_subcommand(1);

    struct Sub {
        CLI::App* cmd;
        ParamSource src;
        bool paper = false;
        int (*run)(const KeyValueConfig&);
    };
    std::vector<Sub*> subs;
    auto add = [&](const std::string& name, const std::string& help,
                   int (*run)(const KeyValueConfig&), bool paper_flag = false) {
        Sub* s = new Sub;
        s->cmd = app.add_subcommand(name, help);
        s->run = run;
        attach_common(s->cmd, s->src);
        if (paper_flag)
            s->cmd->add_flag("--paper", s->paper, "full paper-scale run (n=512, reps=10000)");
        subs.push_back(s);
        return s;
    };

    add("gen-data", "generate phantom, convolved truth, noisy data, variance", cmd_gen_data);
    add("quantiles", "simulate reference quantiles (cache via MISCAT_CACHE_DIR)", cmd_quantiles,
        true);
    add("scan", "scan data against a quantile table; exit 0 found / 10 none", cmd_scan);
    add("level-study", "empirical familywise error per noise scenario", cmd_level_study);
    add("power-study", "block-signal power vs the closed-form prediction", cmd_power_study);
    add("detection-boundary", "largest detectable noise level per scale and probe preset",
        cmd_detection_boundary);
    add("fwhm", "kernel spread report", cmd_fwhm);

    CLI11_PARSE(app, argc, argv);

    try {
        for (Sub* s : subs) {
            if (s->cmd->parsed()) {
                KeyValueConfig cfg = base_defaults();
                if (s->paper) apply_paper_scale(cfg);
                cfg = s->src.resolve(cfg);
                return s->run(cfg);
            }
        }
        std::fprintf(stderr, "no subcommand\n");
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
