#pragma once
#include <functional>
#include <vector>

#include "miscat/grid.hpp"

namespace miscat {

// Convolution kernel family with Fourier symbol (1 + b^2 |xi|^2)^(-a).
// b is quoted in unit-cube coordinates. On the discrete grid the symbol is
// sampled at xi_m = 2m per axis for integer mode m, so the kernel's angular
// length scale is b/pi; this is the sampling under which (a=2, b=0.0243)
// has a spatial FWHM of about 10 pixels at n=512.
struct ConvolutionKernelSpec {
    int d = 2;
    int a = 2;
    double b = 0.0243;
};

// Closed-form symbol value at an arbitrary frequency point (any length d).
double fourier_symbol(const ConvolutionKernelSpec& k, const std::vector<double>& xi);

// Periodic convolution on the n-grid via symbol multiplication in the
// spectrum. Mean is preserved (symbol(0) = 1).
GridSignal convolve(const ConvolutionKernelSpec& k, const GridSignal& f);

// Spatial kernel synthesized on the n-grid, peak centered at index n/2 per
// axis. Sums to 1.
GridSignal kernel_field(const ConvolutionKernelSpec& k, int n, double pixel_size = 1.0);

// Full width at half maximum of the centered kernel in physical units
// (pixels times pixel_size), by linear interpolation on the central profile.
double fwhm(const ConvolutionKernelSpec& k, int n, double pixel_size = 1.0);

// Moment ratio E|X|^4 / (E|X|^2)^2 of the normalized kernel, which reduces
// to classical kurtosis in d=1. For this family it is 2(a+1)/a, independent
// of b.
double kurtosis(const ConvolutionKernelSpec& k, int n);

// Oracle entry points shared with tests: synthesize a field from a radial
// symbol given in angular frequency units (mode m sits at 2*pi*m), and
// measure an already synthesized field.
GridSignal field_of_radial_symbol(int d, int n, double pixel_size,
                                  const std::function<double(double)>& symbol_angular);
double fwhm_of_field(const GridSignal& g);
double kurtosis_of_field(const GridSignal& g);

}  // namespace miscat
