#include "miscat/rng.hpp"

#include <cmath>

#include "miscat/grid.hpp"

namespace miscat {

static inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
    uint64_t p = uint64_t(a) * uint64_t(b);
    hi = uint32_t(p >> 32);
    lo = uint32_t(p);
}

void philox_block(uint64_t key, uint32_t c0, uint32_t c1, uint32_t c2, uint32_t c3,
                  uint32_t out[4]) {
    constexpr uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    uint32_t k0 = uint32_t(key), k1 = uint32_t(key >> 32);
    for (int round = 0; round < 10; ++round) {
        uint32_t hi0, lo0, hi1, lo1;
        mulhilo(M0, c0, hi0, lo0);
        mulhilo(M1, c2, hi1, lo1);
        uint32_t n0 = hi1 ^ c1 ^ k0;
        uint32_t n1 = lo1;
        uint32_t n2 = hi0 ^ c3 ^ k1;
        uint32_t n3 = lo0;
        c0 = n0; c1 = n1; c2 = n2; c3 = n3;
        k0 += W0; k1 += W1;
    }
    out[0] = c0; out[1] = c1; out[2] = c2; out[3] = c3;
}

uint32_t RngStream::next_u32() {
    if (have == 0) {
        philox_block(seed ^ (uint64_t(stream) << 32 | rep), block, unit, rep, stream, buf);
        ++block;
        have = 4;
    }
    return buf[4 - have--];
}

uint64_t RngStream::next_u64() {
    uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
}

double RngStream::uniform() {
    // 53-bit mantissa, strictly inside (0,1)
    return (double((next_u64() >> 11)) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return normal_quantile(uniform()); }

double RngStream::exponential() { return -std::log(uniform()); }

double RngStream::student_t(int nu) {
    if (nu < 1) throw error("student_t: nu must be >= 1");
    double z = normal();
    double s = 0.0;
    for (int i = 0; i < nu; ++i) {
        double w = normal();
        s += w * w;
    }
    return z / std::sqrt(s / double(nu));
}

uint64_t RngStream::poisson(double lambda) {
    if (lambda < 0.0) throw error("poisson: negative intensity");
    if (lambda == 0.0) return 0;
    if (lambda < 10.0) {
        // inversion by sequential search
        double p = std::exp(-lambda), c = p, u = uniform();
        uint64_t k = 0;
        while (u > c && k < 10000) {
            ++k;
            p *= lambda / double(k);
            c += p;
        }
        return k;
    }
    // PTRS transformed rejection (Hormann), exact and deterministic per stream
    const double slam = std::sqrt(lambda);
    const double loglam = std::log(lambda);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        double U = uniform() - 0.5;
        double V = uniform();
        double us = 0.5 - std::fabs(U);
        double kf = std::floor((2.0 * a / us + b) * U + lambda + 0.43);
        if (us >= 0.07 && V <= v_r) return uint64_t(kf);
        if (kf < 0.0 || (us < 0.013 && V > us)) continue;
        if (std::log(V * inv_alpha / (a / (us * us) + b)) <=
            kf * loglam - lambda - std::lgamma(kf + 1.0))
            return uint64_t(kf);
    }
}

double normal_quantile(double p) {
    // AS241 PPND16
    if (!(p > 0.0 && p < 1.0)) throw error("normal_quantile: p must be in (0,1)");
    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        double num = (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                           6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                         1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                       1.3314166789178437745e2) * r + 3.3871328727963666080e0);
        double den = (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                           3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                         5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                       4.2313330701600911252e1) * r + 1.0);
        return q * num / den;
    }
    r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        double num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                           2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                         3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                       4.63033784615654529590e0) * r + 1.42343711074968357734e0);
        double den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                           1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                         6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                       2.05319162663775882187e0) * r + 1.0);
        val = num / den;
    } else {
        r -= 5.0;
        double num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                           1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                         2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                       5.46378491116411436990e0) * r + 6.65790464350110377720e0);
        double den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                           1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                         1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                       5.99832206555887937690e-1) * r + 1.0);
        val = num / den;
    }
    return (q < 0.0) ? -val : val;
}

void fill_normal(double* out, std::size_t count, uint64_t seed, uint32_t stream, uint32_t rep) {
    for (std::size_t i = 0; i < count; ++i) {
        RngStream s(seed, stream, rep, uint32_t(i));
        out[i] = s.normal();
    }
}

}  // namespace miscat
