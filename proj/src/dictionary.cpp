#include "miscat/dictionary.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "miscat/fft.hpp"

namespace miscat {

namespace {

double binom(int n, int k) {
    double acc = 1.0;
    for (int i = 0; i < k; ++i) acc = acc * double(n - i) / double(i + 1);
    return acc;
}

void check_inputs(const TensorProbe& probe, const ConvolutionKernelSpec& kernel, int kx, int ky,
                  int n, bool allow_undersmoothed) {
    if (probe.d != 2) throw error("build_phi_h: probe must be 2-dimensional");
    if (kernel.d != 2) throw error("build_phi_h: kernel must be 2-dimensional");
    if (kx < 1 || ky < 1 || n < 2 || kx > n || ky > n)
        throw error("build_phi_h: box must fit the grid");
    if (probe.beta < 2 * kernel.a && !allow_undersmoothed)
        throw error("build_phi_h: probe smoothness below 2a; pass allow_undersmoothed to force");
}

// per-axis derivative samples g^{(order)} at k midpoints, orders 0,2,...,2a
std::vector<std::vector<double>> axis_tables(const Poly& g, int a, int k) {
    std::vector<std::vector<double>> t(std::size_t(a) + 1);
    Poly cur = g;
    for (int j = 0; j <= a; ++j) {
        t[std::size_t(j)].resize(std::size_t(k));
        for (int p = 0; p < k; ++p)
            t[std::size_t(j)][std::size_t(p)] = cur.eval((double(p) + 0.5) / double(k));
        if (j < a) cur = cur.derivative(2);
    }
    return t;
}

}  // namespace

double kernel_angular_scale(const ConvolutionKernelSpec& kernel) {
    return kernel.b / std::acos(-1.0);
}

DictionaryElement build_phi_h(const TensorProbe& probe, const ConvolutionKernelSpec& kernel,
                              int kx, int ky, int n, bool allow_undersmoothed) {
    check_inputs(probe, kernel, kx, ky, n, allow_undersmoothed);
    const int a = kernel.a;
    const double beff = kernel_angular_scale(kernel);
    const double hx = double(kx) / double(n), hy = double(ky) / double(n);

    auto tx = axis_tables(probe.axis[0], a, kx);
    auto ty = axis_tables(probe.axis[1], a, ky);

    DictionaryElement el;
    el.kx = kx;
    el.ky = ky;
    el.n = n;
    el.stencil.assign(std::size_t(kx) * std::size_t(ky), 0.0);
    for (int j = 0; j <= a; ++j) {
        double sj = (j % 2) ? -1.0 : 1.0;
        for (int k = 0; k <= j; ++k) {
            double cf = sj * binom(a, j) * binom(j, k) * std::pow(beff / hx, 2 * k) *
                        std::pow(beff / hy, 2 * (j - k));
            const auto& gx = tx[std::size_t(k)];
            const auto& gy = ty[std::size_t(j - k)];
            for (int p = 0; p < kx; ++p)
                for (int q = 0; q < ky; ++q)
                    el.stencil[std::size_t(p) * ky + q] += cf * gx[std::size_t(p)] * gy[std::size_t(q)];
        }
    }
    double ss = 0.0, sa = 0.0;
    for (double v : el.stencil) {
        ss += v * v;
        sa += std::fabs(v);
    }
    const double cell = hx * hy / (double(kx) * double(ky));
    el.norm_pixel = std::sqrt(ss);
    el.l2_norm = std::sqrt(ss * cell);
    el.l1_norm = sa * cell;
    return el;
}

std::vector<double> build_phi_h_fourier_oracle(const TensorProbe& probe,
                                               const ConvolutionKernelSpec& kernel, int kx, int ky,
                                               int n, int oversample) {
    check_inputs(probe, kernel, kx, ky, n, true);
    int R = oversample;
    if (R <= 0) R = std::max(3, 256 / std::max(kx, ky));
    if (R % 2 == 0) ++R;
    const int kmax = std::max(kx, ky);
    const int nf = 2 * R * kmax;  // window of 2*R*kmax fine steps, step 1/(R*n)
    const double beff = kernel_angular_scale(kernel);
    const double L = double(nf) / (double(R) * double(n));
    const double twopi = 2.0 * std::acos(-1.0);

    RealBuf field(std::size_t(nf) * nf, 0.0);
    for (int p = 0; p < R * kx; ++p) {
        double gxv = probe.axis[0].eval((double(p) + 0.5) / double(R * kx));
        for (int q = 0; q < R * ky; ++q) {
            double gyv = probe.axis[1].eval((double(q) + 0.5) / double(R * ky));
            field[std::size_t(p) * nf + q] = gxv * gyv;
        }
    }
    CplxBuf sp(spectrum_size(nf));
    forward_r2c_2d(nf, field.data(), sp.data());
    const int nc = nf / 2 + 1;
    for (int ix = 0; ix < nf; ++ix) {
        double mx = (ix <= nf / 2) ? double(ix) : double(ix - nf);
        double xx = twopi * mx / L;
        for (int iy = 0; iy < nc; ++iy) {
            double yy = twopi * double(iy) / L;
            sp[std::size_t(ix) * nc + iy] *=
                std::pow(1.0 + beff * beff * (xx * xx + yy * yy), double(kernel.a));
        }
    }
    inverse_c2r_2d(nf, sp.data(), field.data());

    std::vector<double> out(std::size_t(kx) * ky);
    for (int p = 0; p < kx; ++p) {
        int fp = p * R + R / 2;
        for (int q = 0; q < ky; ++q)
            out[std::size_t(p) * ky + q] = field[std::size_t(fp) * nf + q * R + R / 2];
    }
    return out;
}

std::pair<std::vector<double>, double> xi_limit(const TensorProbe& probe,
                                                const ConvolutionKernelSpec& kernel,
                                                int resolution) {
    if (probe.d != 2) throw error("xi_limit: probe must be 2-dimensional");
    if (probe.beta < 2 * kernel.a)
        throw error("xi_limit: probe smoothness below 2a");
    const int a = kernel.a;
    const int r = resolution;
    if (r < 2) throw error("xi_limit: resolution too small");
    const double beff = kernel_angular_scale(kernel);

    auto tx = axis_tables(probe.axis[0], a, r);
    std::vector<double> field(std::size_t(r) * r, 0.0);
    double scale = std::pow(beff, 2 * a);
    for (int k = 0; k <= a; ++k) {
        double cf = scale * binom(a, k);
        const auto& gx = tx[std::size_t(k)];
        const auto& gy = tx[std::size_t(a - k)];
        for (int p = 0; p < r; ++p)
            for (int q = 0; q < r; ++q)
                field[std::size_t(p) * r + q] += cf * gx[std::size_t(p)] * gy[std::size_t(q)];
    }
    double ss = 0.0;
    for (double v : field) ss += v * v;
    return {std::move(field), std::sqrt(ss / (double(r) * double(r)))};
}

double deconv_gumbel_K(const TensorProbe& probe, const ConvolutionKernelSpec& kernel, double delta,
                       double Delta) {
    if (!(delta > 0.0 && delta < Delta && Delta <= 1.0))
        throw error("deconv_gumbel_K: need 0 < delta < Delta <= 1");
    if (probe.beta < 2 * kernel.a)
        throw error("deconv_gumbel_K: probe smoothness below 2a");
    const int a = kernel.a;

    // derivative tables up to order 2a+1 per axis
    std::vector<Poly> dx(std::size_t(2 * a) + 2), dy(std::size_t(2 * a) + 2);
    dx[0] = probe.axis[0];
    dy[0] = probe.axis[1];
    for (int j = 1; j <= 2 * a + 1; ++j) {
        dx[std::size_t(j)] = dx[std::size_t(j) - 1].derivative();
        dy[std::size_t(j)] = dy[std::size_t(j) - 1].derivative();
    }
    auto ip = [](const Poly& p, const Poly& q) {
        Poly pr = poly_mul(p, q);
        double acc = 0.0;
        for (std::size_t i = 0; i < pr.coeffs.size(); ++i) acc += pr.coeffs[i] / double(i + 1);
        return acc;
    };

    // phi01 terms: g^{(2k)}(x) g^{(2(a-k)+1)}(y); phi10 swaps the axis roles
    double xi2 = 0.0, n01 = 0.0, n10 = 0.0, cross = 0.0;
    for (int k = 0; k <= a; ++k) {
        for (int l = 0; l <= a; ++l) {
            double c = binom(a, k) * binom(a, l);
            xi2 += c * ip(dx[std::size_t(2 * k)], dx[std::size_t(2 * l)]) *
                   ip(dy[std::size_t(2 * (a - k))], dy[std::size_t(2 * (a - l))]);
            n01 += c * ip(dx[std::size_t(2 * k)], dx[std::size_t(2 * l)]) *
                   ip(dy[std::size_t(2 * (a - k)) + 1], dy[std::size_t(2 * (a - l)) + 1]);
            n10 += c * ip(dx[std::size_t(2 * k) + 1], dx[std::size_t(2 * l) + 1]) *
                   ip(dy[std::size_t(2 * (a - k))], dy[std::size_t(2 * (a - l))]);
            cross += c * ip(dx[std::size_t(2 * k)], dx[std::size_t(2 * l) + 1]) *
                     ip(dy[std::size_t(2 * (a - k)) + 1], dy[std::size_t(2 * (a - l))]);
        }
    }
    if (xi2 <= 0.0 || n01 <= 0.0 || n10 <= 0.0)
        throw error("deconv_gumbel_K: degenerate probe norms");
    double disc = n01 * n10 - cross * cross;  // ||phi01||^2 ||phi10||^2 - <phi01,phi10>^2
    if (disc < 0.0) disc = 0.0;
    const double pi = std::acos(-1.0);
    // det(D^-1) = sqrt(disc)/||Xi||^2: gradient Gram determinant of the
    // unit-normalized limit shape; bandwidth and amplitude factors cancel
    return std::log(Delta / delta) * std::pow(2.0 * pi, -1.5) * std::sqrt(disc) / xi2;
}

std::vector<DictionaryElement> build_dictionary(const TensorProbe& probe,
                                                const ConvolutionKernelSpec& kernel,
                                                const std::vector<std::pair<int, int>>& scales_px,
                                                int n, bool allow_undersmoothed) {
    std::vector<DictionaryElement> out;
    out.reserve(scales_px.size());
    for (auto [kx, ky] : scales_px)
        out.push_back(build_phi_h(probe, kernel, kx, ky, n, allow_undersmoothed));
    return out;
}

void dump_dictionary_csv(const std::vector<DictionaryElement>& dict, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw error("dump_dictionary_csv: cannot open " + path);
    os << "scale_px_x,scale_px_y,l2_norm,probe_l1_norm\n";
    char buf[128];
    for (const auto& el : dict) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.12g,%.12g\n", el.kx, el.ky, el.l2_norm, el.l1_norm);
        os << buf;
    }
}

}  // namespace miscat
