#pragma once

// Deconvolution dictionary: for a box scale h = (kx/n, ky/n) the image-space
// stencil Phi_h is the differential-operator expansion
//   Phi_h = sum_{j=0}^{a} (-1)^j C(a,j) sum_{k=0}^{j} C(j,k)
//           (beff/h1)^{2k} (beff/h2)^{2(j-k)} d^{(2k,2(j-k))} phi
// evaluated on box-midpoint samples, where beff = b/pi is the kernel's
// angular length scale under the frequency convention of convolve().
// Testing f against Phi_h in image space equals testing it against the
// plain probe phi_h in object space.

#include <string>
#include <utility>
#include <vector>

#include "miscat/kernel.hpp"
#include "miscat/probe.hpp"

namespace miscat {

struct DictionaryElement {
    int kx = 0;  // box extent in pixels, x axis
    int ky = 0;
    int n = 0;                    // grid the scale refers to
    std::vector<double> stencil;  // kx*ky row-major, x slowest
    double norm_pixel = 0.0;      // sqrt(sum of squared stencil values)
    double l2_norm = 0.0;         // midpoint-quadrature L2 norm over the box
    double l1_norm = 0.0;         // midpoint-quadrature L1 norm over the box
};

// Kernel length scale in angular-frequency units; see kernel.hpp for the
// lattice convention that fixes the factor 1/pi.
double kernel_angular_scale(const ConvolutionKernelSpec& kernel);

// beta < 2a loses the boundary-vanishing of the highest-order term; callers
// must opt in explicitly (undersmoothed probe configurations do).
DictionaryElement build_phi_h(const TensorProbe& probe, const ConvolutionKernelSpec& kernel,
                              int kx, int ky, int n, bool allow_undersmoothed = false);

// Independent construction by discrete Fourier division on an oversampled
// grid; test oracle only. oversample must be odd so coarse box midpoints lie
// on fine sample points; pass 0 to pick a default targeting ~256 fine points
// across the box.
std::vector<double> build_phi_h_fourier_oracle(const TensorProbe& probe,
                                               const ConvolutionKernelSpec& kernel, int kx, int ky,
                                               int n, int oversample = 0);

// Small-scale limit shape: beff^{2a} sum_k C(a,k) d^{(2k,2(a-k))} phi on a
// resolution^2 midpoint lattice of the unit box, plus its quadrature L2 norm.
// |h|^{2a} ||Phi_h|| converges to this norm as h -> 0.
std::pair<std::vector<double>, double> xi_limit(const TensorProbe& probe,
                                                const ConvolutionKernelSpec& kernel,
                                                int resolution);

// Gumbel-limit constant of the isotropic-square scale system:
//   K = det(D^{-1}) log(Delta/delta) (2 pi)^{-3/2},
//   det(D^{-1}) = sqrt(||phi10||^2 ||phi01||^2 - <phi10,phi01>^2) / ||Xi||^2
// with Xi = sum_k C(a,k) d^{(2k,2(a-k))} phi the small-scale limit shape and
// phi_alpha = sum_k C(a,k) d^{(2k+a1, 2(a-k)+a2)} phi, |alpha| = 1, its first
// partials. Norms and inner products are exact polynomial integrals over the
// unit box; the ratio is invariant under probe amplitude scaling and
// independent of the kernel bandwidth (the unit normalization absorbs both).
// The constant addresses the limit law; finite-sample runs calibrate (K, C_d)
// against pre-simulated reference quantiles instead (see studies.hpp).
double deconv_gumbel_K(const TensorProbe& probe, const ConvolutionKernelSpec& kernel,
                       double delta, double Delta);

std::vector<DictionaryElement> build_dictionary(const TensorProbe& probe,
                                                const ConvolutionKernelSpec& kernel,
                                                const std::vector<std::pair<int, int>>& scales_px,
                                                int n, bool allow_undersmoothed = false);

// One row per element: scale_px_x, scale_px_y, l2_norm, probe_l1_norm.
void dump_dictionary_csv(const std::vector<DictionaryElement>& dict, const std::string& path);

}  // namespace miscat
