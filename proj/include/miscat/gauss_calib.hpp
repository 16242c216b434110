#pragma once

// Monte-Carlo calibration: draws of the distribution-free Gaussian reference
// statistic S(W) = max over (position, scale) of omega_i (|<zeta, Phi_i>| /
// ||Phi_i||_pixel - omega_i), quantile tables, and an empirical comparison
// against the explicit limit CDF. Draws are keyed by (seed, rep) through the
// counter-based generator, so results are independent of thread count.

#include <cstdint>
#include <string>
#include <vector>

#include "miscat/scan.hpp"

namespace miscat {

struct QuantileTable {
    std::vector<double> levels;
    std::vector<double> quantiles;
    int reps = 0;
    std::uint64_t seed = 0;
    std::uint64_t fingerprint = 0;
};

// Stencil spectra are cached across replications; construction cost is one
// FFT per dictionary element.
class ReferenceSimulator {
  public:
    ReferenceSimulator(const ScanConfig& config, const std::vector<DictionaryElement>& dict);
    ~ReferenceSimulator();
    ReferenceSimulator(const ReferenceSimulator&) = delete;
    ReferenceSimulator& operator=(const ReferenceSimulator&) = delete;

    double draw(std::uint64_t seed, std::uint64_t rep) const;
    std::vector<double> draws(std::uint64_t seed, int reps, int threads) const;

    // per-scale maxima |<zeta,Phi>|/||Phi||_pixel of one replication, in
    // config.scales order; one row per rep in draws_per_scale
    std::vector<double> scale_maxima(std::uint64_t seed, std::uint64_t rep) const;

  private:
    struct Impl;
    Impl* impl_;
};

double simulate_SW_draw(const ScanConfig& config, const std::vector<DictionaryElement>& dict,
                        std::uint64_t seed, std::uint64_t rep);

// order statistic at ceil(level*reps), conservative for upper tails
double empirical_quantile(std::vector<double> draws, double level);

QuantileTable quantile_table(const ScanConfig& config, const std::vector<DictionaryElement>& dict,
                             int reps, const std::vector<double>& levels, std::uint64_t seed,
                             int threads = 1);

// loads a stored table when (fingerprint, reps, seed) match, else simulates
// and stores one
QuantileTable quantile_table_cached(const ScanConfig& config,
                                    const std::vector<DictionaryElement>& dict, int reps,
                                    const std::vector<double>& levels, std::uint64_t seed,
                                    int threads, const std::string& cache_path);

// sup distance between the empirical CDF of samples and gumbel_cdf(., prefactor)
double gumbel_compare(std::vector<double> samples, double prefactor);

std::uint64_t config_fingerprint(const ScanConfig& config,
                                 const std::vector<DictionaryElement>& dict);

void write_quantile_csv(const QuantileTable& table, const std::string& path);
QuantileTable read_quantile_csv(const std::string& path);

}  // namespace miscat
