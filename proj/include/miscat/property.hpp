#pragma once

// Cross-module consistency checks exercised by tests and the acceptance
// harness: average Hoelder regularity of stencils, discretization bias of
// empirical coefficients, the small-scale norm identity, and pure-noise
// familywise error. Each check returns a small report row; a run is
// reproducible from (id, seed).

#include <string>
#include <vector>

#include "miscat/dictionary.hpp"
#include "miscat/grid.hpp"
#include "miscat/noise.hpp"
#include "miscat/scan.hpp"

namespace miscat {

struct PropertyReport {
    std::string id;
    bool pass = false;
    double value = 0.0;      // measured quantity the tolerance applies to
    double tolerance = 0.0;  // upper bound on value for a pass
    uint64_t seed = 0;
};

// Ratio of the shift-difference energy to L * |t-s|^(2 gamma) * energy for
// the element's mother function on its unit support; shifts are sampled in
// whole stencil cells along coordinate axes (sample_pairs draws plus the
// unit shifts of both axes). Pass when max ratio <= tolerance.
PropertyReport check_ahc(const DictionaryElement& element, double gamma, double L,
                         int sample_pairs, uint64_t seed = 20240901);

// Gap between the n-grid empirical coefficient of a noiseless image and a
// fine_factor-refined quadrature of the same inner product, for the box
// anchored at (tx, ty). value = n^(d/2) * gap / stencil L2 norm; tolerance
// is the slow-log target 1/(log(n)^2 log(log(n))^2).
PropertyReport check_bias(const GridSignal& image, const TensorProbe& probe,
                          const ConvolutionKernelSpec& kernel, int kx, int ky, int tx, int ty,
                          int fine_factor);

// ||Phi_h||_2 * h^(2a) along an isotropic scale sweep against the h -> 0
// limit norm from xi_limit; value = relative gap at the smallest h, and the
// sweep must approach the limit monotonically up to slack.
PropertyReport check_scaling_identity(const TensorProbe& probe,
                                      const ConvolutionKernelSpec& kernel,
                                      const std::vector<double>& h_sweep, double tolerance);

// Pure-noise replications of the full scan at level alpha; value = empirical
// familywise error, tolerance = alpha + band where band is the binomial
// 3-sigma half-width. Threads > 1 parallelizes over replications.
PropertyReport check_fwer(const ScanConfig& config, const std::vector<DictionaryElement>& dict,
                          const NoiseSpec& noise, double quantile, int reps, uint64_t seed,
                          int threads = 1);

void write_property_csv(const std::vector<PropertyReport>& reports, const std::string& path);

}  // namespace miscat
