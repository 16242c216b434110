#include "miscat/kernel.hpp"

#include <cmath>

#include "miscat/fft.hpp"

namespace miscat {

namespace {

void check_spec(const ConvolutionKernelSpec& k) {
    if (k.d < 1 || k.d > 2) throw error("kernel: only d=1 and d=2 supported");
    if (k.a < 0) throw error("kernel: a must be >= 0");
    if (k.b <= 0.0) throw error("kernel: b must be positive");
}

// signed integer frequency of DFT bin i on an n-grid
inline double bin_freq(int i, int n) { return (i <= n / 2) ? double(i) : double(i - n); }

// Relative mass of the kernel on the outermost pixel frame. Guards fwhm and
// moment measurements against wrap-around of a kernel too wide for the grid.
void check_tail(const GridSignal& g) {
    double tail = 0.0, total = 0.0;
    const int n = g.n;
    if (g.d == 1) {
        for (int i = 0; i < n; ++i) {
            double v = std::fabs(g.values[std::size_t(i)]);
            total += v;
            if (i == 0 || i == n - 1) tail += v;
        }
    } else {
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy) {
                double v = std::fabs(g.at(ix, iy));
                total += v;
                if (ix == 0 || iy == 0 || ix == n - 1 || iy == n - 1) tail += v;
            }
    }
    if (total <= 0.0 || tail > 1e-6 * total)
        throw error("kernel: tail mass on the grid boundary exceeds 1e-6 of total");
}

}  // namespace

double fourier_symbol(const ConvolutionKernelSpec& k, const std::vector<double>& xi) {
    check_spec(k);
    double s2 = 0.0;
    for (double x : xi) s2 += x * x;
    return std::pow(1.0 + k.b * k.b * s2, -double(k.a));
}

GridSignal convolve(const ConvolutionKernelSpec& k, const GridSignal& f) {
    check_spec(k);
    if (f.d != k.d) throw error("convolve: dimension mismatch between kernel and field");
    const int n = f.n;
    GridSignal out = f;
    if (k.d == 1) {
        CplxBuf sp(std::size_t(n) / 2 + 1);
        forward_r2c_1d(n, f.values.data(), sp.data());
        for (int i = 0; i <= n / 2; ++i) {
            double xi = 2.0 * double(i);
            sp[std::size_t(i)] *= std::pow(1.0 + k.b * k.b * xi * xi, -double(k.a));
        }
        inverse_c2r_1d(n, sp.data(), out.values.data());
        return out;
    }
    CplxBuf sp(spectrum_size(n));
    forward_r2c_2d(n, f.values.data(), sp.data());
    const int nc = n / 2 + 1;
    for (int ix = 0; ix < n; ++ix) {
        double fx = 2.0 * bin_freq(ix, n);
        for (int iy = 0; iy < nc; ++iy) {
            double fy = 2.0 * double(iy);
            sp[std::size_t(ix) * nc + iy] *=
                std::pow(1.0 + k.b * k.b * (fx * fx + fy * fy), -double(k.a));
        }
    }
    inverse_c2r_2d(n, sp.data(), out.values.data());
    return out;
}

GridSignal field_of_radial_symbol(int d, int n, double pixel_size,
                                  const std::function<double(double)>& symbol_angular) {
    if (d < 1 || d > 2) throw error("field_of_radial_symbol: only d=1 and d=2");
    if (n < 4) throw error("field_of_radial_symbol: n too small");
    GridSignal g = GridSignal::zeros(d, n, pixel_size);
    const double twopi = 2.0 * std::acos(-1.0);
    if (d == 1) {
        CplxBuf sp(std::size_t(n) / 2 + 1);
        for (int i = 0; i <= n / 2; ++i) sp[std::size_t(i)] = symbol_angular(twopi * double(i));
        inverse_c2r_1d(n, sp.data(), g.values.data());
        // rotate the peak from index 0 to n/2
        std::vector<double> shifted(g.values.size());
        for (int i = 0; i < n; ++i) shifted[std::size_t((i + n / 2) % n)] = g.values[std::size_t(i)];
        g.values = shifted;
        return g;
    }
    CplxBuf sp(spectrum_size(n));
    const int nc = n / 2 + 1;
    for (int ix = 0; ix < n; ++ix) {
        double fx = bin_freq(ix, n);
        for (int iy = 0; iy < nc; ++iy) {
            double fy = double(iy);
            sp[std::size_t(ix) * nc + iy] = symbol_angular(twopi * std::hypot(fx, fy));
        }
    }
    std::vector<double> raw(g.values.size());
    inverse_c2r_2d(n, sp.data(), raw.data());
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            g.at((ix + n / 2) % n, (iy + n / 2) % n) = raw[std::size_t(ix) * n + iy];
    return g;
}

GridSignal kernel_field(const ConvolutionKernelSpec& k, int n, double pixel_size) {
    check_spec(k);
    const double pi = std::acos(-1.0);
    auto sym = [&](double w) {
        double xi = w / pi;  // lattice xi_m = 2m versus angular 2*pi*m
        return std::pow(1.0 + k.b * k.b * xi * xi, -double(k.a));
    };
    return field_of_radial_symbol(k.d, n, pixel_size, sym);
}

double fwhm_of_field(const GridSignal& g) {
    check_tail(g);
    const int n = g.n;
    const int c = n / 2;
    std::vector<double> prof;
    prof.reserve(std::size_t(n - c));
    if (g.d == 1)
        for (int i = c; i < n; ++i) prof.push_back(g.values[std::size_t(i)]);
    else
        for (int i = c; i < n; ++i) prof.push_back(g.at(c, i));
    const double half = prof[0] / 2.0;
    if (prof[0] <= 0.0) throw error("fwhm: field peak is not positive");
    for (std::size_t i = 1; i < prof.size(); ++i) {
        if (prof[i] < half) {
            double r = double(i - 1) + (prof[i - 1] - half) / (prof[i - 1] - prof[i]);
            return 2.0 * r * g.pixel_size;
        }
    }
    throw error("fwhm: profile never crosses half maximum on the grid");
}

double kurtosis_of_field(const GridSignal& g) {
    check_tail(g);
    const int n = g.n;
    const int c = n / 2;
    double total = 0.0;
    for (double v : g.values) total += v;
    if (total <= 0.0) throw error("kurtosis: field has nonpositive mass");
    double m2 = 0.0, m4 = 0.0;
    if (g.d == 1) {
        double mean = 0.0;
        for (int i = 0; i < n; ++i) mean += g.values[std::size_t(i)] * double(i);
        mean /= total;
        for (int i = 0; i < n; ++i) {
            double r2 = (double(i) - mean) * (double(i) - mean);
            m2 += g.values[std::size_t(i)] * r2;
            m4 += g.values[std::size_t(i)] * r2 * r2;
        }
    } else {
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy) {
                double r2 = double((ix - c)) * (ix - c) + double((iy - c)) * (iy - c);
                m2 += g.at(ix, iy) * r2;
                m4 += g.at(ix, iy) * r2 * r2;
            }
    }
    m2 /= total;
    m4 /= total;
    if (m2 <= 0.0) throw error("kurtosis: degenerate second moment");
    return m4 / (m2 * m2);
}

double fwhm(const ConvolutionKernelSpec& k, int n, double pixel_size) {
    return fwhm_of_field(kernel_field(k, n, pixel_size));
}

double kurtosis(const ConvolutionKernelSpec& k, int n) {
    return kurtosis_of_field(kernel_field(k, n));
}

}  // namespace miscat
