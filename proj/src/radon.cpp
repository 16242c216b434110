#include "miscat/radon.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "miscat/fft.hpp"

namespace miscat {

double RadonGrid::pi_value() { return std::numbers::pi; }

namespace {

constexpr double kPi = std::numbers::pi;

// J0 by the classical rational fits (small x) and the modulus-phase
// asymptotic form (large x); absolute error below 2e-8, which keeps the
// spectral tabulations honest at arguments where the library Bessel call
// would dominate the runtime.
double bessel_j0(double x) {
    const double ax = std::fabs(x);
    if (ax < 8.0) {
        const double y = x * x;
        const double p1 =
            57568490574.0 +
            y * (-13362590354.0 +
                 y * (651619640.7 + y * (-11214424.18 + y * (77392.33017 + y * (-184.9052456)))));
        const double p2 =
            57568490411.0 +
            y * (1029532985.0 + y * (9494680.718 + y * (59272.64853 + y * (267.8532712 + y))));
        return p1 / p2;
    }
    const double z = 8.0 / ax, y = z * z;
    const double xx = ax - 0.785398164;
    const double p1 =
        1.0 + y * (-0.1098628627e-2 +
                   y * (0.2734510407e-4 + y * (-0.2073370639e-5 + y * 0.2093887211e-6)));
    const double p2 =
        -0.1562499995e-1 +
        y * (0.1430488765e-3 +
             y * (-0.6911147651e-5 + y * (0.7621095161e-6 + y * (-0.934935152e-7))));
    return std::sqrt(0.636619772 / ax) * (std::cos(xx) * p1 - z * std::sin(xx) * p2);
}

double bilinear(const GridSignal& f, double p0, double p1) {
    const int n = f.n;
    const double g0 = p0 * n - 0.5, g1 = p1 * n - 0.5;
    const int i0 = int(std::floor(g0)), i1 = int(std::floor(g1));
    const double f0 = g0 - i0, f1 = g1 - i1;
    double acc = 0.0;
    for (int d0 = 0; d0 <= 1; ++d0) {
        const int j0 = i0 + d0;
        if (j0 < 0 || j0 >= n) continue;
        const double w0 = d0 ? f0 : 1.0 - f0;
        for (int d1 = 0; d1 <= 1; ++d1) {
            const int j1 = i1 + d1;
            if (j1 < 0 || j1 >= n) continue;
            const double w1 = d1 ? f1 : 1.0 - f1;
            acc += w0 * w1 * f.at(j0, j1);
        }
    }
    return acc;
}

}  // namespace

Sinogram radon_forward(const GridSignal& f, const RadonGrid& grid) {
    if (f.d != 2) throw error("radon_forward: d=2 grids only");
    if (grid.n_angles < 1 || grid.n_offsets < 1) throw error("radon_forward: empty grid");
    if (grid.n_angles != grid.n_offsets)
        throw error("radon_forward: square sinograms only (n_angles == n_offsets)");
    Sinogram out = GridSignal::zeros(2, grid.n_angles);
    const double dtau = 1.0 / (2.0 * f.n);
    const double tau_max = std::numbers::sqrt2;
    const int m = int(std::ceil(2.0 * tau_max / dtau));
    for (int k = 0; k < grid.n_angles; ++k) {
        const double th = grid.angle(k);
        const double c = std::cos(th), s = std::sin(th);
        for (int l = 0; l < grid.n_offsets; ++l) {
            const double u = grid.offset(l);
            double acc = 0.0;
            for (int j = 0; j < m; ++j) {
                const double tau = -tau_max + (j + 0.5) * dtau;
                const double v0 = u * c - tau * s;
                const double v1 = u * s + tau * c;
                if (v0 < 0.0 || v0 > 1.0 || v1 < 0.0 || v1 > 1.0) continue;
                acc += bilinear(f, v0, v1);
            }
            out.at(k, l) = acc * dtau;
        }
    }
    return out;
}

double radon_probe_psi(const RadialProbe& probe, double s, int refine) {
    // Simpson over [0,1]; the integrand p(r) J0(s r) r vanishes at r=0. The
    // panel count grows with s so the J0 oscillation stays resolved and the
    // quadrature noise sits far below the transform's decaying envelope.
    const int r_mul = std::max(1, refine);
    int panels = 512 * r_mul;
    const int osc = int(std::ceil(6.0 * std::fabs(s))) * r_mul;
    if (osc > panels) panels = osc + (osc & 1);
    const double hstep = 1.0 / panels;
    double acc = 0.0;
    for (int i = 0; i <= panels; ++i) {
        const double r = i * hstep;
        const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * probe.profile(r) * bessel_j0(s * r) * r;
    }
    return 2.0 * kPi * acc * hstep / 3.0;
}

namespace {

// Tabulation of Phi on x in [0, x_max] with uniform step, by a half-complex
// inverse FFT of psi(s) s. The spectrum is cut where psi(s) s has decayed to
// 1e-9 of its running peak; the FFT span is padded 4x past x_max to push the
// periodization tail down.
struct PhiTable {
    double dx = 0;
    std::vector<double> values;  // Phi(j*dx)

    double eval(double x) const {
        const double ax = std::fabs(x) / dx;
        const std::size_t i = std::size_t(ax);
        if (i + 1 >= values.size()) return 0.0;
        const double f = ax - double(i);
        return values[i] * (1.0 - f) + values[i + 1] * f;
    }
};

PhiTable build_phi_table(const RadialProbe& probe, double x_max, int refine) {
    PhiTable t;
    t.dx = 0.004 / refine;
    const double span = std::max(2.0 * (x_max + 1.0), 96.0);
    int n = 1;
    while (n * t.dx < span) n <<= 1;
    const double ds = 2.0 * kPi / (n * t.dx);
    CplxBuf spec(std::size_t(n) / 2 + 1, 0.0);
    // the spectrum ends where a whole block of samples has decayed; a block
    // spans several oscillation periods, so a single Bessel zero cannot
    // trigger the cut
    const int block = std::max(256, int(std::ceil(8.0 / ds)));
    double peak = 0.0, block_max = 0.0;
    for (int m = 1; m < n / 2; ++m) {
        const double s = m * ds;
        const double g = radon_probe_psi(probe, s, refine) * s;
        peak = std::max(peak, std::fabs(g));
        block_max = std::max(block_max, std::fabs(g));
        spec[std::size_t(m)] = g;
        if (m % block == 0) {
            if (peak > 0 && block_max < 1e-5 * peak && s > 32.0) break;
            block_max = 0.0;
        }
    }
    RealBuf field(std::size_t(n), 0.0);
    inverse_c2r_1d(n, spec.data(), field.data());
    // c2r returns (1/n)(g0 + 2 sum Re(g_m e^(2 pi i j m / n)) + ...); the
    // rectangle rule for (1/(2(2pi)^2)) Int psi(|s|)|s| e^(isx) ds over the
    // whole line doubles the one-sided sum, so the factor is n ds / (2(2pi)^2)
    const double factor = n * ds / (2.0 * std::pow(2.0 * kPi, 2));
    const std::size_t count = std::size_t(x_max / t.dx) + 2;
    t.values.resize(std::min(count, std::size_t(n)));
    for (std::size_t j = 0; j < t.values.size(); ++j) t.values[j] = field[j] * factor;
    return t;
}

}  // namespace

std::vector<double> radon_phi(const RadialProbe& probe, int d, const std::vector<double>& x_grid,
                              int refine) {
    if (d != 2) throw error("radon_phi: d=2 only");
    double x_max = 1.0;
    for (double x : x_grid) x_max = std::max(x_max, std::fabs(x));
    PhiTable t = build_phi_table(probe, x_max, refine);
    std::vector<double> out(x_grid.size());
    for (std::size_t i = 0; i < x_grid.size(); ++i) out[i] = t.eval(x_grid[i]);
    return out;
}

Sinogram radon_phi_field(const RadialProbe& probe, const RadonGrid& grid, double t0, double t1,
                         double h, int refine) {
    if (grid.n_angles != grid.n_offsets) throw error("radon_phi_field: square sinograms only");
    if (h <= 0) throw error("radon_phi_field: h must be positive");
    const double reach = (1.0 + std::hypot(t0, t1)) / h;
    PhiTable t = build_phi_table(probe, reach, refine);
    Sinogram out = GridSignal::zeros(2, grid.n_angles);
    const double scale = 1.0 / h;  // h^(-d/2) at d=2
    for (int k = 0; k < grid.n_angles; ++k) {
        const double th = grid.angle(k);
        const double c = t0 * std::cos(th) + t1 * std::sin(th);
        for (int l = 0; l < grid.n_offsets; ++l)
            out.at(k, l) = scale * t.eval((grid.offset(l) - c) / h);
    }
    return out;
}

double cylinder_inner(const Sinogram& A, const Sinogram& B) {
    if (A.n != B.n || A.d != 2 || B.d != 2) throw error("cylinder_inner: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < A.values.size(); ++i) acc += A.values[i] * B.values[i];
    const int n = A.n;
    return 2.0 * acc * (1.0 / n) * (2.0 * kPi / n);
}

double probe_object_inner(const GridSignal& f, const RadialProbe& probe, double t0, double t1,
                          double h) {
    if (f.d != 2) throw error("probe_object_inner: d=2 grids only");
    const int n = f.n;
    double acc = 0.0;
    for (int i0 = 0; i0 < n; ++i0) {
        for (int i1 = 0; i1 < n; ++i1) {
            const double x0 = (i0 + 0.5) / n - t0, x1 = (i1 + 0.5) / n - t1;
            const double r = std::hypot(x0, x1) / h;
            if (r >= 1.0) continue;
            acc += f.at(i0, i1) * probe.profile(r);
        }
    }
    return acc / (h * double(n) * double(n));
}

std::vector<double> radon_dxi(const RadialProbe& probe, int d, int refine) {
    if (d != 2) throw error("radon_dxi: d=2 only");
    // C_{phi,d} = 4 pi / ||F1[psi(|.|)|.|]||^2 over R x S^1, taken from the
    // tabulated Phi via F1[...] = 2 (2pi)^d Phi and the S^1 factor 2 pi; the
    // quadratic tail of Phi makes the norm integral converge like x_max^-3
    const double x_max = 60.0;
    PhiTable t = build_phi_table(probe, x_max, refine);
    double phi_l2 = 0.0;
    for (std::size_t j = 1; j + 1 < t.values.size(); ++j) phi_l2 += t.values[j] * t.values[j];
    phi_l2 = (2.0 * phi_l2 + t.values[0] * t.values[0]) * t.dx;  // even in x
    const double f1_norm2 = std::pow(2.0 * std::pow(2.0 * kPi, d), 2) * 2.0 * kPi * phi_l2;
    const double C = 4.0 * kPi / f1_norm2;

    // polar quadrature of Int omega_1^2 |omega|^(d-1) psi(|omega|)^2 d omega
    const int n_theta = 64;
    double ang = 0.0;
    for (int i = 0; i < n_theta; ++i) {
        const double th = 2.0 * kPi * (i + 0.5) / n_theta;
        ang += std::cos(th) * std::cos(th);
    }
    ang *= 2.0 * kPi / n_theta;
    const double ds = 0.05 / refine;
    double rad = 0.0;
    double peak = 0.0;
    for (int m = 1; m < 4000000; ++m) {
        const double s = m * ds;
        const double g = radon_probe_psi(probe, s, refine);
        const double term = std::pow(s, d + 2) * g * g;
        peak = std::max(peak, std::fabs(term));
        if (peak > 0 && std::fabs(term) < 1e-10 * peak && s > 16.0) break;
        rad += term;
    }
    rad *= ds;
    const double diag = C * ang * rad;
    if (!std::isfinite(diag)) throw error("radon_dxi: divergent integral");
    return std::vector<double>(std::size_t(d), diag);
}

double radon_gumbel_K(double rho, double delta, double Delta, const std::vector<double>& dxi_diag,
                      int d) {
    if (rho < 0 || rho >= 1) throw error("radon_gumbel_K: rho must lie in [0,1)");
    if (!(0 < delta && delta < Delta && Delta <= 1))
        throw error("radon_gumbel_K: need 0 < delta < Delta <= 1");
    if (int(dxi_diag.size()) != d) throw error("radon_gumbel_K: diagonal size != d");
    double det = 1.0;
    for (double v : dxi_diag) det *= v;
    if (det <= 0) throw error("radon_gumbel_K: nonpositive determinant");
    return std::pow(1.0 - rho, d) * std::pow(2.0 * kPi, -0.5 * (d + 1)) * std::sqrt(det) *
           std::log(Delta / delta);
}

}  // namespace miscat
