#include "miscat/calibration.hpp"

#include <cmath>

namespace miscat {

double omega(const CalibrationParams& params, double h_product) {
    if (!(h_product > 0.0)) throw error("omega: h_product must be positive");
    if (!(params.K > 0.0)) throw error("omega: K must be positive");
    const double ratio = params.K / h_product;
    if (ratio < std::sqrt(std::exp(1.0)) * (1.0 - 1e-12))
        throw error("omega: K/h_product below sqrt(e); shrink h_max or raise K");
    const double s = std::sqrt(2.0 * std::log(ratio));
    return s + params.C_d * std::log(s) / s;
}

ScaleSystem scale_system_from_string(const std::string& name) {
    if (name == "dense_full") return ScaleSystem::dense_full;
    if (name == "single_scale") return ScaleSystem::single_scale;
    if (name == "dense_squares") return ScaleSystem::dense_squares;
    throw error("unknown scale system: " + name);
}

double select_Cd(ScaleSystem system, int d, double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw error("select_Cd: gamma must be in (0,1]");
    switch (system) {
        case ScaleSystem::dense_full: return 2.0 * d + double(d) / gamma - 1.0;
        case ScaleSystem::single_scale: return double(d) / gamma - 1.0;
        case ScaleSystem::dense_squares: return 1.0 + double(d) / gamma;
    }
    throw error("select_Cd: invalid system");
}

double i_d_constant(double delta, double Delta, int d) {
    if (!(delta > 0.0 && delta < Delta && Delta <= 1.0))
        throw error("i_d_constant: need 0 < delta < Delta <= 1");
    if (d < 1) throw error("i_d_constant: d must be >= 1");
    double binom = 1.0, acc = 0.0;
    for (int k = 0; k <= d; ++k) {
        double sign = (k % 2) ? -1.0 : 1.0;
        acc += sign * binom * std::log(double(k) * delta + double(d - k) * Delta);
        binom = binom * double(d - k) / double(k + 1);
    }
    double fact = 1.0;
    for (int i = 2; i < d; ++i) fact *= double(i);
    double lead = ((d - 1) % 2) ? -1.0 : 1.0;
    return lead / fact * acc;
}

double gumbel_cdf(double lambda, double prefactor) {
    if (!(prefactor > 0.0)) throw error("gumbel_cdf: prefactor must be positive");
    return std::exp(-std::exp(-lambda) * prefactor);
}

double standard_K(double gamma, double det_DXi_inv, double i_d, int d) {
    if (!(det_DXi_inv > 0.0)) throw error("standard_K: det must be positive");
    if (!(i_d > 0.0)) throw error("standard_K: i_d must be positive");
    const double pi = std::acos(-1.0);
    if (gamma == 0.5) return det_DXi_inv * i_d / std::sqrt(2.0 * pi);
    if (gamma == 1.0) return det_DXi_inv * i_d / std::pow(2.0 * pi, 0.5 * (d + 1));
    throw error("standard_K: only gamma in {1/2, 1} supported");
}

}  // namespace miscat
