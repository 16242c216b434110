#pragma once
#include <cstddef>
#include <cstdint>

namespace miscat {

// Philox4x32-10 block cipher. Draws are addressed, not sequential: the value
// at counter (c0,c1,c2,c3) under a key never depends on what else was drawn,
// so replication- or pixel-parallel sampling is reproducible regardless of
// thread count or evaluation order.
void philox_block(uint64_t key, uint32_t c0, uint32_t c1, uint32_t c2, uint32_t c3,
                  uint32_t out[4]);

// One logical substream addressed by (seed, stream, rep, unit). stream tags
// the purpose (noise field, Monte-Carlo draw, ...), unit is typically a pixel
// index. Successive draws advance the remaining counter word.
struct RngStream {
    uint64_t seed = 0;
    uint32_t stream = 0;
    uint32_t rep = 0;
    uint32_t unit = 0;
    uint32_t block = 0;
    uint32_t buf[4] = {0, 0, 0, 0};
    int have = 0;

    RngStream(uint64_t seed_, uint32_t stream_, uint32_t rep_, uint32_t unit_ = 0)
        : seed(seed_), stream(stream_), rep(rep_), unit(unit_) {}

    uint32_t next_u32();
    uint64_t next_u64();
    double uniform();        // (0,1), 53-bit mantissa
    double normal();         // inverse CDF
    double exponential();    // -log(U)
    uint64_t poisson(double lambda);
    double student_t(int nu);  // Z0 / sqrt(mean of nu squared normals), nu >= 1
};

// Standard normal quantile (AS241 double-precision branch).
double normal_quantile(double p);

// Fills out[i], i < count, with a standard normal addressed by
// (seed, stream, rep, i).
void fill_normal(double* out, std::size_t count, uint64_t seed, uint32_t stream, uint32_t rep);

}  // namespace miscat
