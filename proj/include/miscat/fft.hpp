#pragma once
#include <complex>
#include <cstddef>
#include <vector>

namespace miscat {

// Aligned storage so FFTW's new-array execute keeps SIMD kernels usable.
void* fft_malloc(std::size_t bytes);
void fft_free(void* p) noexcept;

template <class T>
struct FftAllocator {
    using value_type = T;
    FftAllocator() = default;
    template <class U>
    FftAllocator(const FftAllocator<U>&) {}
    T* allocate(std::size_t n) { return static_cast<T*>(fft_malloc(n * sizeof(T))); }
    void deallocate(T* p, std::size_t) noexcept { fft_free(p); }
    template <class U>
    bool operator==(const FftAllocator<U>&) const { return true; }
};

using RealBuf = std::vector<double, FftAllocator<double>>;
using CplxBuf = std::vector<std::complex<double>, FftAllocator<std::complex<double>>>;

inline std::size_t spectrum_size(int n) { return std::size_t(n) * (std::size_t(n) / 2 + 1); }

// Cached-plan FFT frontend. Plan creation is serialized internally; execution
// is safe from multiple threads on distinct buffers. All plans are created
// with deterministic (estimate) planning so results do not depend on runtime
// measurement.
//
// 2-D transforms act on n-by-n row-major real fields and their half-complex
// spectra of shape n-by-(n/2+1). inverse_c2r includes the 1/n^2 factor so
// inverse_c2r(forward_r2c(x)) == x, and it clobbers its input (FFTW c2r).
void forward_r2c_2d(int n, const double* in, std::complex<double>* out);
void inverse_c2r_2d(int n, std::complex<double>* in, double* out);

// 1-D variants, length n, spectrum length n/2+1, same conventions.
void forward_r2c_1d(int n, const double* in, std::complex<double>* out);
void inverse_c2r_1d(int n, std::complex<double>* in, double* out);

}  // namespace miscat
