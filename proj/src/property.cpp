#include "miscat/property.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <mutex>
#include <thread>

#include "miscat/fft.hpp"
#include "miscat/rng.hpp"

namespace miscat {

namespace {

double stencil_energy(const std::vector<double>& s) {
    double e = 0.0;
    for (double v : s) e += v * v;
    return e;
}

// Difference energy of the stencil against itself shifted by (dx, dy)
// pixels, zero outside the support.
double shift_diff_energy(const DictionaryElement& el, int dx, int dy) {
    double e = 0.0;
    for (int px = std::min(0, dx); px < el.kx + std::max(0, dx); ++px) {
        for (int py = std::min(0, dy); py < el.ky + std::max(0, dy); ++py) {
            auto sample = [&](int x, int y) -> double {
                if (x < 0 || x >= el.kx || y < 0 || y >= el.ky) return 0.0;
                return el.stencil[std::size_t(x) * el.ky + y];
            };
            double diff = sample(px, py) - sample(px - dx, py - dy);
            e += diff * diff;
        }
    }
    return e;
}

}  // namespace

PropertyReport check_ahc(const DictionaryElement& element, double gamma, double L,
                         int sample_pairs, uint64_t seed) {
    if (element.kx <= 0 || element.ky <= 0) throw error("check_ahc: empty element");
    if (gamma <= 0.0 || gamma > 1.0) throw error("check_ahc: gamma must lie in (0, 1]");
    if (L <= 0.0) throw error("check_ahc: L must be positive");

    const double energy = stencil_energy(element.stencil);
    if (energy <= 0.0) throw error("check_ahc: zero stencil");

    // The mother function lives on the unit square; one stencil cell is
    // 1/kx by 1/ky. Shifts are whole cells along one axis: the condition
    // bounds axis moves of the scan window, and the cell quadrature of the
    // difference energy is exact for piecewise constant stencils.
    std::vector<std::pair<int, int>> shifts = {{1, 0}, {0, 1}};
    RngStream rng(seed, 2, 0, 0);
    for (int i = 0; i < sample_pairs; ++i) {
        int axis = (rng.next_u32() & 1u) ? 1 : 0;
        int extent = axis == 0 ? element.kx : element.ky;
        int m = 1 + int(rng.uniform() * extent);
        m = std::min(m, extent);
        shifts.emplace_back(axis == 0 ? m : 0, axis == 0 ? 0 : m);
    }

    double max_ratio = 0.0;
    for (auto [dx, dy] : shifts) {
        double ex = double(dx) / element.kx;
        double ey = double(dy) / element.ky;
        double dist = std::hypot(ex, ey);
        double bound = L * std::pow(dist, 2.0 * gamma) * energy;
        double ratio = shift_diff_energy(element, dx, dy) / bound;
        max_ratio = std::max(max_ratio, ratio);
    }

    PropertyReport rep;
    rep.id = "ahc";
    rep.value = max_ratio;
    rep.tolerance = 1.0 + 1e-3;
    rep.pass = max_ratio <= rep.tolerance;
    rep.seed = seed;
    return rep;
}

namespace {

// Band-limited upsampling of image * kernel: the n-grid spectrum is placed
// into an (n*ff)-grid spectrum, each mode weighted by the kernel symbol.
// Nyquist row and column are halved and the row is mirrored so the fine
// field stays real-consistent; on the coarse lattice both halves alias back
// to the original values.
GridSignal convolved_upsample(const GridSignal& image, const ConvolutionKernelSpec& kernel,
                              int ff) {
    const int n = image.n;
    const int nf = n * ff;
    RealBuf coarse(std::size_t(n) * n);
    std::copy(image.values.begin(), image.values.end(), coarse.begin());
    CplxBuf spec(spectrum_size(n));
    forward_r2c_2d(n, coarse.data(), spec.data());

    CplxBuf fine_spec(spectrum_size(nf));
    std::fill(fine_spec.begin(), fine_spec.end(), std::complex<double>(0.0, 0.0));
    const int half = n / 2;
    const int cols = half + 1;
    for (int ix = 0; ix < n; ++ix) {
        int fx = ix <= half ? ix : ix - n;
        for (int iy = 0; iy < cols; ++iy) {
            std::complex<double> v = spec[std::size_t(ix) * cols + iy];
            double sym = fourier_symbol(kernel, {2.0 * fx, 2.0 * iy});
            v *= sym * double(ff) * double(ff);
            if (std::abs(fx) == half) v *= 0.5;
            if (iy == half) v *= 0.5;
            auto put = [&](int row) {
                int r = row >= 0 ? row : nf + row;
                fine_spec[std::size_t(r) * (nf / 2 + 1) + iy] += v;
            };
            put(fx);
            if (std::abs(fx) == half) put(-fx);
        }
    }

    RealBuf fine(std::size_t(nf) * nf);
    inverse_c2r_2d(nf, fine_spec.data(), fine.data());
    GridSignal out = GridSignal::zeros(2, nf, image.pixel_size / ff);
    std::copy(fine.begin(), fine.end(), out.values.begin());
    return out;
}

double box_inner(const GridSignal& field, const DictionaryElement& el, int tx, int ty) {
    double acc = 0.0;
    for (int px = 0; px < el.kx; ++px)
        for (int py = 0; py < el.ky; ++py)
            acc += field.at(tx + px, ty + py) * el.stencil[std::size_t(px) * el.ky + py];
    double n = double(el.n);
    return acc / (n * n);
}

}  // namespace

PropertyReport check_bias(const GridSignal& image, const TensorProbe& probe,
                          const ConvolutionKernelSpec& kernel, int kx, int ky, int tx, int ty,
                          int fine_factor) {
    if (fine_factor < 2) throw error("check_bias: fine_factor must be at least 2");
    const int n = image.n;
    if (tx < 0 || ty < 0 || tx + kx > n || ty + ky > n)
        throw error("check_bias: box leaves the grid");

    GridSignal data = convolve(kernel, image);
    DictionaryElement el = build_phi_h(probe, kernel, kx, ky, n);
    double coarse = box_inner(data, el, tx, ty);

    GridSignal fine = convolved_upsample(image, kernel, fine_factor);
    DictionaryElement el_fine =
        build_phi_h(probe, kernel, kx * fine_factor, ky * fine_factor, n * fine_factor);
    double refined = box_inner(fine, el_fine, tx * fine_factor, ty * fine_factor);

    PropertyReport rep;
    rep.id = "bias";
    rep.value = double(n) * std::abs(coarse - refined) / el.l2_norm;
    double ln = std::log(double(n));
    rep.tolerance = 1.0 / (ln * ln * std::pow(std::log(ln), 2.0));
    rep.pass = rep.value <= rep.tolerance;
    rep.seed = 0;
    return rep;
}

PropertyReport check_scaling_identity(const TensorProbe& probe,
                                      const ConvolutionKernelSpec& kernel,
                                      const std::vector<double>& h_sweep, double tolerance) {
    if (h_sweep.empty()) throw error("check_scaling_identity: empty sweep");
    const int res = 128;
    auto [xi, xi_norm] = xi_limit(probe, kernel, res);
    const double expo = 2.0 * kernel.a;

    double prev_gap = 0.0;
    bool ordered = true;
    double gap = 0.0;
    for (std::size_t i = 0; i < h_sweep.size(); ++i) {
        double h = h_sweep[i];
        if (h <= 0.0 || h > 0.5) throw error("check_scaling_identity: h outside (0, 1/2]");
        int n = int(std::lround(res / h));
        DictionaryElement el = build_phi_h(probe, kernel, res, res, n, true);
        double value = el.l2_norm * std::pow(h, expo);
        gap = std::abs(value - xi_norm) / xi_norm;
        if (i > 0 && gap > prev_gap * 1.2 + 1e-9) ordered = false;
        prev_gap = gap;
    }

    PropertyReport rep;
    rep.id = "scaling";
    rep.value = gap;
    rep.tolerance = tolerance;
    rep.pass = ordered && gap <= tolerance;
    rep.seed = 0;
    return rep;
}

PropertyReport check_fwer(const ScanConfig& config, const std::vector<DictionaryElement>& dict,
                          const NoiseSpec& noise, double quantile, int reps, uint64_t seed,
                          int threads) {
    if (reps < 10) throw error("check_fwer: need at least 10 replications");
    GridSignal truth = GridSignal::zeros(config.d, config.n);
    GridSignal var_field = variance_truth(noise, truth);

    threads = std::max(1, threads);
    std::mutex mtx;
    int next_rep = 0;
    int rejected = 0;
    auto worker = [&]() {
        for (;;) {
            int rep;
            {
                std::lock_guard<std::mutex> lk(mtx);
                if (next_rep >= reps) return;
                rep = next_rep++;
            }
            GridSignal y = generate(truth, noise, seed, uint32_t(rep));
            ScanResult r = scan_reject(y, var_field, config, dict, std::nullopt);
            if (r.max_statistic > quantile) {
                std::lock_guard<std::mutex> lk(mtx);
                ++rejected;
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    PropertyReport rep;
    rep.id = "fwer";
    rep.value = double(rejected) / reps;
    double band = 3.0 * std::sqrt(config.alpha * (1.0 - config.alpha) / reps);
    rep.tolerance = config.alpha + band;
    rep.pass = rep.value <= rep.tolerance;
    rep.seed = seed;
    return rep;
}

void write_property_csv(const std::vector<PropertyReport>& reports, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw error("cannot open " + path);
    std::fprintf(f, "id,status,value,tolerance,seed\n");
    for (const auto& r : reports)
        std::fprintf(f, "%s,%s,%.12g,%.12g,%llu\n", r.id.c_str(), r.pass ? "pass" : "fail",
                     r.value, r.tolerance, (unsigned long long)r.seed);
    std::fclose(f);
}

}  // namespace miscat
