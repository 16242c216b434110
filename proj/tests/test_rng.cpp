#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "miscat/grid.hpp"
#include "miscat/rng.hpp"

using namespace miscat;

// Published Philox4x32-10 known-answer vectors (zero, all-ones, pi-digits).
TEST_CASE("philox known answers") {
    uint32_t o[4];

    philox_block(0, 0, 0, 0, 0, o);
    CHECK(o[0] == 0x6627e8d5u);
    CHECK(o[1] == 0xe169c58du);
    CHECK(o[2] == 0xbc57ac4cu);
    CHECK(o[3] == 0x9b00dbd8u);

    philox_block(0xffffffffffffffffULL, 0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu, o);
    CHECK(o[0] == 0x408f276du);
    CHECK(o[1] == 0x41c83b0eu);
    CHECK(o[2] == 0xa20bc7c6u);
    CHECK(o[3] == 0x6d5451fdu);

    philox_block(0x299f31d0a4093822ULL, 0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u, o);
    CHECK(o[0] == 0xd16cfe09u);
    CHECK(o[1] == 0x94fdccebu);
    CHECK(o[2] == 0x5001e420u);
    CHECK(o[3] == 0x24126ea1u);
}

TEST_CASE("stream addressing separates and reproduces") {
    RngStream a(42, 1, 7, 3), a2(42, 1, 7, 3);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u32() == a2.next_u32());

    // any coordinate change moves the stream
    RngStream b(42, 1, 7, 4), c(42, 1, 8, 3), d(42, 2, 7, 3), e(43, 1, 7, 3);
    RngStream ref(42, 1, 7, 3);
    uint32_t r0 = ref.next_u32();
    CHECK(b.next_u32() != r0);
    CHECK(c.next_u32() != r0);
    CHECK(d.next_u32() != r0);
    CHECK(e.next_u32() != r0);
}

TEST_CASE("fill_normal matches per-unit streams") {
    const std::size_t count = 257;
    std::vector<double> out(count, 0.0);
    fill_normal(out.data(), count, 99, 2, 5);
    for (std::size_t i = 0; i < count; i += 17) {
        RngStream s(99, 2, 5, uint32_t(i));
        CHECK(out[i] == s.normal());
    }
}

TEST_CASE("uniform lies strictly inside (0,1) with matching moments") {
    RngStream s(7, 0, 0, 0);
    const int N = 20000;
    double sum = 0, sq = 0;
    for (int i = 0; i < N; ++i) {
        double u = s.uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        sum += u;
        sq += u * u;
    }
    double mean = sum / N, var = sq / N - mean * mean;
    CHECK(std::abs(mean - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / N));
    CHECK(std::abs(var - 1.0 / 12.0) < 0.005);
}

// AS241 spot values, reference precision 1e-15 relative.
TEST_CASE("normal quantile oracle values") {
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
    CHECK(normal_quantile(0.01) == doctest::Approx(-2.3263478740408408).epsilon(1e-13));
    CHECK(normal_quantile(0.99) == doctest::Approx(2.3263478740408408).epsilon(1e-13));
    CHECK(normal_quantile(1e-10) == doctest::Approx(-6.3613409024040557).epsilon(1e-12));
    CHECK(normal_quantile(0.3) == doctest::Approx(-0.52440051270804089).epsilon(1e-13));
    // symmetry across the median
    for (double p : {0.2, 0.05, 1e-6}) {
        CHECK(normal_quantile(p) == doctest::Approx(-normal_quantile(1.0 - p)).epsilon(1e-10));
    }
}

TEST_CASE("normal draws have standard moments") {
    RngStream s(11, 0, 3, 0);
    const int N = 20000;
    double sum = 0, sq = 0;
    for (int i = 0; i < N; ++i) {
        double z = s.normal();
        sum += z;
        sq += z * z;
    }
    double mean = sum / N, var = sq / N - mean * mean;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(double(N)));
    CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("exponential mean") {
    RngStream s(13, 0, 0, 0);
    const int N = 20000;
    double sum = 0;
    for (int i = 0; i < N; ++i) sum += s.exponential();
    CHECK(std::abs(sum / N - 1.0) < 4.0 / std::sqrt(double(N)));
}

TEST_CASE("poisson small and large lambda") {
    RngStream z(17, 0, 0, 0);
    for (int i = 0; i < 100; ++i) CHECK(z.poisson(0.0) == 0);

    const int N = 20000;
    for (double lambda : {0.7, 4.2, 150.0}) {
        RngStream s(17, 0, uint32_t(lambda * 10), 0);
        double sum = 0, sq = 0;
        for (int i = 0; i < N; ++i) {
            double v = double(s.poisson(lambda));
            sum += v;
            sq += v * v;
        }
        double mean = sum / N, var = sq / N - mean * mean;
        CHECK(std::abs(mean - lambda) < 5.0 * std::sqrt(lambda / N));
        CHECK(var / lambda > 0.9);
        CHECK(var / lambda < 1.1);
    }
}

TEST_CASE("student t variance at nu=6") {
    RngStream s(19, 0, 0, 0);
    const int N = 40000;
    double sum = 0, sq = 0;
    for (int i = 0; i < N; ++i) {
        double v = s.student_t(6);
        sum += v;
        sq += v * v;
    }
    double mean = sum / N, var = sq / N - mean * mean;
    CHECK(std::abs(mean) < 0.05);
    CHECK(var == doctest::Approx(1.5).epsilon(0.08));  // nu/(nu-2)
}

TEST_CASE("student t nu=1 draws stay finite with centered median") {
    RngStream s(23, 0, 0, 0);
    const int N = 20001;
    std::vector<double> v(N);
    for (int i = 0; i < N; ++i) {
        v[i] = s.student_t(1);
        CHECK(std::isfinite(v[i]));
    }
    std::nth_element(v.begin(), v.begin() + N / 2, v.end());
    CHECK(std::abs(v[N / 2]) < 0.05);
    CHECK_THROWS_AS(s.student_t(0), error);
}
