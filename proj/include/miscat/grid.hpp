#pragma once
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace miscat {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dense scalar field sampled on the pixel grid of the unit cube, n pixels per
// axis, row-major. Pixel centers sit at (i+1/2)/n. pixel_size carries the
// physical size of one pixel for unit reporting only; no algorithm depends on
// it.
struct GridSignal {
    int d = 2;
    int n = 0;
    double pixel_size = 1.0;
    std::vector<double> values;

    static GridSignal zeros(int d, int n, double pixel_size = 1.0);

    std::size_t size() const { return values.size(); }

    // d=2 accessors, first index slow
    double& at(int ix, int iy) { return values[std::size_t(ix) * n + iy]; }
    double at(int ix, int iy) const { return values[std::size_t(ix) * n + iy]; }
};

// PGRID text format: one header line "PGRID d n pixel_size", optionally
// followed by '#' metadata lines, then n^d values row-major at 17 significant
// digits. Writing and re-reading is value-exact.
GridSignal read_pgrid(const std::string& path);
void write_pgrid(const std::string& path, const GridSignal& g,
                 const std::string& metadata = "");

// 8-bit binary PGM preview, linear ramp over [min, max]. d=2 only.
void write_pgm(const std::string& path, const GridSignal& g);

// 17-significant-digit formatting used by every text emitter so re-emitting a
// parsed file is byte-identical.
std::string format_value(double v);

}  // namespace miscat
