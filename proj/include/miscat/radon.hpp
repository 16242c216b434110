#pragma once

// Grid Radon transform and its adapted dictionary profile. For a radial
// object-space probe phi(x) = p(|x|), the matching image-space profile is
//
//   Phi(x) = (1/(2 (2pi)^d)) F1[ psi(|.|) |.|^(d-1) ](x),
//   psi(s) = (F_d phi)(s theta)   (radial, theta-independent),
//
// with the Fourier convention F g(xi) = Int g(x) exp(+i<x,xi>) dx. Angular
// backprojection of Phi reproduces phi exactly, so the discrete pairing of a
// sinogram with the shifted, scaled Phi approximates the object-space inner
// product with the shifted, scaled probe.
//
// Design: n_angles angles uniform over the full circle, offsets
// u_l = (l+1/2)/n in (0,1). Each line at distance < 1 from the origin appears
// once with positive offset; the negative-offset half of the cylinder
// R x S^1 mirrors the data under (u, theta) -> (-u, theta+pi), which both
// sinograms of real objects and the even profile Phi respect, so cylinder
// inner products double the observed half.

#include <functional>
#include <vector>

#include "miscat/grid.hpp"

namespace miscat {

struct RadonGrid {
    int n_angles = 0;
    int n_offsets = 0;

    double angle(int k) const { return 2.0 * pi_value() * k / n_angles; }
    double offset(int l) const { return (l + 0.5) / n_offsets; }
    static double pi_value();
};

// Sinogram rows are angles (slow index), columns offsets. Square when
// n_angles == n_offsets, which the scan-free tests use so PGRID export works.
using Sinogram = GridSignal;

// Line integrals of f over {<v, theta_k> = u_l} by midpoint quadrature with
// step 1/(2n), f bilinearly interpolated between pixel centers and zero
// outside the unit square.
Sinogram radon_forward(const GridSignal& f, const RadonGrid& grid);

// Radial probe profile p on [0,1]; phi(x) = p(|x|), support inside the unit
// ball.
struct RadialProbe {
    std::function<double(double)> profile;
};

// psi(s) = 2 pi Int_0^1 p(r) J0(s r) r dr, the d=2 radial Fourier transform.
double radon_probe_psi(const RadialProbe& probe, double s, int refine = 1);

// Phi evaluated at x_grid: oversampled-FFT tabulation of the defining 1-D
// transform on a fine uniform grid, then linear interpolation. refine scales
// the internal quadrature densities for convergence tests.
std::vector<double> radon_phi(const RadialProbe& probe, int d, const std::vector<double>& x_grid,
                              int refine = 1);

// Sinogram of the dictionary element at position t, scale h:
// h^(-d/2) Phi((u - <theta, t>)/h).
Sinogram radon_phi_field(const RadialProbe& probe, const RadonGrid& grid, double t0, double t1,
                         double h, int refine = 1);

// Full-cylinder L2 inner product of two antipodal-symmetric sinogram fields:
// twice the observed-half quadrature sum with weights (1/n_offsets) du and
// (2pi/n_angles) dtheta.
double cylinder_inner(const Sinogram& A, const Sinogram& B);

// Object-space pairing (1/n^2) sum f_j h^(-d/2) p(|x_j - t|/h) over pixel
// centers, the discrete <f, probe at (t,h)>.
double probe_object_inner(const GridSignal& f, const RadialProbe& probe, double t0, double t1,
                          double h);

// Diagonal of D_Xi^(-2): C_{phi,d} times the polar-quadrature value of
// Int omega_1^2 |omega|^(d-1) |F_d phi(omega)|^2 d omega, replicated d times.
// C_{phi,d} is computed from the tabulated Phi so the whole chain shares one
// code path; scaling the probe by c leaves the product invariant.
std::vector<double> radon_dxi(const RadialProbe& probe, int d, int refine = 1);

// K = (1-rho)^d (2pi)^(-(d+1)/2) det(D_Xi^(-2))^(1/2) log(Delta/delta).
double radon_gumbel_K(double rho, double delta, double Delta, const std::vector<double>& dxi_diag,
                      int d);

}  // namespace miscat
