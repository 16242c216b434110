#include "miscat/gauss_calib.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "miscat/rng.hpp"

namespace miscat {

struct ReferenceSimulator::Impl {
    ScanConfig config;
    std::vector<double> omegas;
    std::vector<double> norms;       // pixel norms per element
    std::vector<CplxBuf> conj_spec;  // conjugated stencil spectra per element
    std::vector<Scale> scales;
};

ReferenceSimulator::ReferenceSimulator(const ScanConfig& config,
                                       const std::vector<DictionaryElement>& dict)
    : impl_(new Impl) {
    config.validate();
    if (dict.size() != config.scales.size())
        throw error("ReferenceSimulator: dictionary does not match config.scales");
    impl_->config = config;
    impl_->scales = config.scales;
    const int n = config.n;
    RealBuf embed(std::size_t(n) * n);
    for (std::size_t si = 0; si < dict.size(); ++si) {
        const auto& el = dict[si];
        if (el.kx != config.scales[si].kx || el.ky != config.scales[si].ky)
            throw error("ReferenceSimulator: dictionary order differs from config.scales");
        impl_->omegas.push_back(omega(config.calibration, config.h_product(config.scales[si])));
        impl_->norms.push_back(el.norm_pixel);
        std::fill(embed.begin(), embed.end(), 0.0);
        for (int p = 0; p < el.kx; ++p)
            std::memcpy(embed.data() + std::size_t(p) * n, el.stencil.data() + std::size_t(p) * el.ky,
                        std::size_t(el.ky) * sizeof(double));
        CplxBuf sp(spectrum_size(n));
        forward_r2c_2d(n, embed.data(), sp.data());
        for (auto& c : sp) c = std::conj(c);
        impl_->conj_spec.push_back(std::move(sp));
    }
}

ReferenceSimulator::~ReferenceSimulator() { delete impl_; }

std::vector<double> ReferenceSimulator::scale_maxima(std::uint64_t seed, std::uint64_t rep) const {
    const int n = impl_->config.n;
    const int margin = impl_->config.boundary_margin_px;
    RealBuf field(std::size_t(n) * n);
    fill_normal(field.data(), field.size(), seed, /*stream=*/0, rep);
    CplxBuf spec(spectrum_size(n));
    forward_r2c_2d(n, field.data(), spec.data());

    CplxBuf prod(spectrum_size(n));
    std::vector<double> out(impl_->scales.size());
    for (std::size_t si = 0; si < impl_->scales.size(); ++si) {
        const auto& cs = impl_->conj_spec[si];
        for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = spec[i] * cs[i];
        inverse_c2r_2d(n, prod.data(), field.data());
        const int kx = impl_->scales[si].kx, ky = impl_->scales[si].ky;
        double best = 0.0;
        for (int ix = margin; ix <= n - kx - margin; ++ix) {
            const double* row = field.data() + std::size_t(ix) * n + margin;
            const int count = n - ky + 1 - 2 * margin;
            for (int iy = 0; iy < count; ++iy) best = std::max(best, std::fabs(row[iy]));
        }
        out[si] = best / impl_->norms[si];
    }
    return out;
}

double ReferenceSimulator::draw(std::uint64_t seed, std::uint64_t rep) const {
    std::vector<double> m = scale_maxima(seed, rep);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t si = 0; si < m.size(); ++si)
        best = std::max(best, impl_->omegas[si] * (m[si] - impl_->omegas[si]));
    return best;
}

std::vector<double> ReferenceSimulator::draws(std::uint64_t seed, int reps, int threads) const {
    if (reps < 1) throw error("draws: reps must be positive");
    std::vector<double> out(std::size_t(reps), 0.0);
    if (threads < 1) threads = 1;
    threads = std::min<int>(threads, reps);
    if (threads == 1) {
        for (int r = 0; r < reps; ++r) out[std::size_t(r)] = draw(seed, std::uint64_t(r));
        return out;
    }
    std::vector<std::thread> pool;
    std::size_t next = 0;
    std::mutex mtx;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t r;
                {
                    std::lock_guard<std::mutex> lk(mtx);
                    if (next >= out.size()) return;
                    r = next++;
                }
                out[r] = draw(seed, r);
            }
        });
    for (auto& th : pool) th.join();
    return out;
}

double simulate_SW_draw(const ScanConfig& config, const std::vector<DictionaryElement>& dict,
                        std::uint64_t seed, std::uint64_t rep) {
    ReferenceSimulator sim(config, dict);
    return sim.draw(seed, rep);
}

double empirical_quantile(std::vector<double> draws, double level) {
    if (draws.empty()) throw error("empirical_quantile: no draws");
    if (!(level > 0.0 && level <= 1.0)) throw error("empirical_quantile: level outside (0,1]");
    std::sort(draws.begin(), draws.end());
    std::size_t idx = std::size_t(std::ceil(level * double(draws.size())));
    if (idx < 1) idx = 1;
    if (idx > draws.size()) idx = draws.size();
    return draws[idx - 1];
}

QuantileTable quantile_table(const ScanConfig& config, const std::vector<DictionaryElement>& dict,
                             int reps, const std::vector<double>& levels, std::uint64_t seed,
                             int threads) {
    if (reps < 100) throw error("quantile_table: need at least 100 reps");
    ReferenceSimulator sim(config, dict);
    std::vector<double> d = sim.draws(seed, reps, threads);
    QuantileTable t;
    t.levels = levels;
    t.reps = reps;
    t.seed = seed;
    t.fingerprint = config_fingerprint(config, dict);
    for (double lv : levels) t.quantiles.push_back(empirical_quantile(d, lv));
    return t;
}

double gumbel_compare(std::vector<double> samples, double prefactor) {
    if (samples.empty()) throw error("gumbel_compare: no samples");
    std::sort(samples.begin(), samples.end());
    const double N = double(samples.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double F = gumbel_cdf(samples[i], prefactor);
        ks = std::max(ks, std::fabs(F - double(i + 1) / N));
        ks = std::max(ks, std::fabs(F - double(i) / N));
    }
    return ks;
}

namespace {

inline void fnv_mix(std::uint64_t& h, const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
}

template <typename T>
void fnv_val(std::uint64_t& h, const T& v) {
    fnv_mix(h, &v, sizeof v);
}

}  // namespace

std::uint64_t config_fingerprint(const ScanConfig& config,
                                 const std::vector<DictionaryElement>& dict) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    fnv_val(h, config.n);
    fnv_val(h, config.d);
    fnv_val(h, config.calibration.K);
    fnv_val(h, config.calibration.C_d);
    fnv_val(h, config.calibration.gamma);
    fnv_val(h, config.boundary_margin_px);
    for (const auto& s : config.scales) {
        fnv_val(h, s.kx);
        fnv_val(h, s.ky);
    }
    for (const auto& el : dict) {
        fnv_val(h, el.kx);
        fnv_val(h, el.ky);
        fnv_val(h, el.n);
        fnv_mix(h, el.stencil.data(), el.stencil.size() * sizeof(double));
    }
    return h;
}

void write_quantile_csv(const QuantileTable& table, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw error("write_quantile_csv: cannot open " + path);
    char buf[160];
    std::snprintf(buf, sizeof buf, "# reps=%d seed=%llu fingerprint=%016llx\n", table.reps,
                  static_cast<unsigned long long>(table.seed),
                  static_cast<unsigned long long>(table.fingerprint));
    os << buf << "level,quantile\n";
    for (std::size_t i = 0; i < table.levels.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", table.levels[i], table.quantiles[i]);
        os << buf;
    }
}

QuantileTable read_quantile_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw error("read_quantile_csv: cannot open " + path);
    QuantileTable t;
    std::string line;
    if (!std::getline(is, line) || line.rfind("# reps=", 0) != 0)
        throw error("read_quantile_csv: missing header in " + path);
    unsigned long long seed = 0, fp = 0;
    if (std::sscanf(line.c_str(), "# reps=%d seed=%llu fingerprint=%llx", &t.reps, &seed, &fp) != 3)
        throw error("read_quantile_csv: malformed header in " + path);
    t.seed = seed;
    t.fingerprint = fp;
    std::getline(is, line);  // column names
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, b;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b))
            throw error("read_quantile_csv: malformed row in " + path);
        t.levels.push_back(std::stod(a));
        t.quantiles.push_back(std::stod(b));
    }
    return t;
}

QuantileTable quantile_table_cached(const ScanConfig& config,
                                    const std::vector<DictionaryElement>& dict, int reps,
                                    const std::vector<double>& levels, std::uint64_t seed,
                                    int threads, const std::string& cache_path) {
    const std::uint64_t fp = config_fingerprint(config, dict);
    {
        std::ifstream probe(cache_path);
        if (probe) {
            QuantileTable t = read_quantile_csv(cache_path);
            if (t.fingerprint == fp && t.reps == reps && t.seed == seed &&
                t.levels.size() >= levels.size()) {
                bool same = true;
                for (std::size_t i = 0; i < levels.size(); ++i)
                    if (std::fabs(t.levels[i] - levels[i]) > 1e-12) same = false;
                if (same) return t;
            }
        }
    }
    QuantileTable t = quantile_table(config, dict, reps, levels, seed, threads);
    write_quantile_csv(t, cache_path);
    return t;
}

}  // namespace miscat
