#include "miscat/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "miscat/grid.hpp"

namespace miscat {

void* fft_malloc(std::size_t bytes) {
    void* p = fftw_malloc(bytes);
    if (!p) throw std::bad_alloc();
    return p;
}

void fft_free(void* p) noexcept { fftw_free(p); }

namespace {

struct PlanSet {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

std::mutex plan_mutex;

// Plans are made once per size on aligned scratch buffers and reused through
// the new-array execute interface.
PlanSet& plans_2d(int n) {
    static std::map<int, PlanSet> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    RealBuf re(std::size_t(n) * std::size_t(n));
    CplxBuf sp(spectrum_size(n));
    PlanSet p;
    p.r2c = fftw_plan_dft_r2c_2d(n, n, re.data(),
                                 reinterpret_cast<fftw_complex*>(sp.data()), FFTW_ESTIMATE);
    p.c2r = fftw_plan_dft_c2r_2d(n, n, reinterpret_cast<fftw_complex*>(sp.data()),
                                 re.data(), FFTW_ESTIMATE);
    if (!p.r2c || !p.c2r) throw error("fft: plan creation failed");
    return cache.emplace(n, p).first->second;
}

PlanSet& plans_1d(int n) {
    static std::map<int, PlanSet> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    RealBuf re(std::size_t(n), 0.0);
    CplxBuf sp(std::size_t(n) / 2 + 1);
    PlanSet p;
    p.r2c = fftw_plan_dft_r2c_1d(n, re.data(),
                                 reinterpret_cast<fftw_complex*>(sp.data()), FFTW_ESTIMATE);
    p.c2r = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(sp.data()),
                                 re.data(), FFTW_ESTIMATE);
    if (!p.r2c || !p.c2r) throw error("fft: plan creation failed");
    return cache.emplace(n, p).first->second;
}

}  // namespace

void forward_r2c_2d(int n, const double* in, std::complex<double>* out) {
    fftw_execute_dft_r2c(plans_2d(n).r2c, const_cast<double*>(in),
                         reinterpret_cast<fftw_complex*>(out));
}

void inverse_c2r_2d(int n, std::complex<double>* in, double* out) {
    fftw_execute_dft_c2r(plans_2d(n).c2r, reinterpret_cast<fftw_complex*>(in), out);
    const double scale = 1.0 / (double(n) * double(n));
    const std::size_t total = std::size_t(n) * std::size_t(n);
    for (std::size_t i = 0; i < total; ++i) out[i] *= scale;
}

void forward_r2c_1d(int n, const double* in, std::complex<double>* out) {
    fftw_execute_dft_r2c(plans_1d(n).r2c, const_cast<double*>(in),
                         reinterpret_cast<fftw_complex*>(out));
}

void inverse_c2r_1d(int n, std::complex<double>* in, double* out) {
    fftw_execute_dft_c2r(plans_1d(n).c2r, reinterpret_cast<fftw_complex*>(in), out);
    const double scale = 1.0 / double(n);
    for (int i = 0; i < n; ++i) out[i] *= scale;
}

}  // namespace miscat
