#pragma once

// Scale calibration for the multiscale scan: the per-scale weight omega, the
// preset constants C_d, the alternating-log constant I_d entering the limit
// law's prefactor, and the explicit limit CDF.

#include <string>

#include "miscat/grid.hpp"

namespace miscat {

struct CalibrationParams {
    double K = 1.0;
    double C_d = 3.0;
    double gamma = 1.0;  // average Hoelder exponent of the dictionary
    int d = 2;
};

// omega = s + C_d log(s)/s with s = sqrt(2 log(K/h_product)).
// Requires K/h_product >= sqrt(e), i.e. s >= 1; violation means the scale
// range is too coarse for the chosen K (shrink h_max or raise K).
double omega(const CalibrationParams& params, double h_product);

enum class ScaleSystem { dense_full, single_scale, dense_squares };

ScaleSystem scale_system_from_string(const std::string& name);

// dense_full: 2d + d/gamma - 1; single_scale: d/gamma - 1;
// dense_squares: 1 + d/gamma.
double select_Cd(ScaleSystem system, int d, double gamma);

// ((-1)^(d-1)/(d-1)!) sum_k (-1)^k C(d,k) log(k delta + (d-k) Delta);
// collapses to log(Delta/delta) at d=1 and depends only on Delta/delta.
double i_d_constant(double delta, double Delta, int d);

// exp(-exp(-lambda) * prefactor)
double gumbel_cdf(double lambda, double prefactor);

// K values that turn the limit into a standard Gumbel law.
// gamma=1/2: det * i_d / sqrt(2 pi); gamma=1: det * i_d / (2 pi)^((d+1)/2).
double standard_K(double gamma, double det_DXi_inv, double i_d, int d);

}  // namespace miscat
