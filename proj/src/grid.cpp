#include "miscat/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace miscat {

GridSignal GridSignal::zeros(int d, int n, double pixel_size) {
    if (d < 1 || d > 2) throw error("GridSignal: only d=1 and d=2 supported");
    if (n < 1) throw error("GridSignal: n must be positive");
    GridSignal g;
    g.d = d;
    g.n = n;
    g.pixel_size = pixel_size;
    std::size_t total = 1;
    for (int k = 0; k < d; ++k) total *= std::size_t(n);
    g.values.assign(total, 0.0);
    return g;
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

GridSignal read_pgrid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("read_pgrid: cannot open " + path);
    std::string magic;
    GridSignal g;
    in >> magic >> g.d >> g.n >> g.pixel_size;
    if (!in || magic != "PGRID") throw error("read_pgrid: bad header in " + path);
    if (g.d < 1 || g.d > 2 || g.n < 1) throw error("read_pgrid: bad dimensions in " + path);
    std::string rest;
    std::getline(in, rest);
    // metadata lines
    while (in.peek() == '#') std::getline(in, rest);
    std::size_t total = 1;
    for (int k = 0; k < g.d; ++k) total *= std::size_t(g.n);
    g.values.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        if (!(in >> g.values[i])) throw error("read_pgrid: truncated value block in " + path);
    }
    return g;
}

void write_pgrid(const std::string& path, const GridSignal& g, const std::string& metadata) {
    std::ofstream out(path);
    if (!out) throw error("write_pgrid: cannot open " + path);
    out << "PGRID " << g.d << ' ' << g.n << ' ' << format_value(g.pixel_size) << '\n';
    if (!metadata.empty()) {
        // each physical line gets its own '#' so readers can skip them
        std::size_t start = 0;
        while (start <= metadata.size()) {
            std::size_t stop = metadata.find('\n', start);
            if (stop == std::string::npos) stop = metadata.size();
            out << "# " << metadata.substr(start, stop - start) << '\n';
            start = stop + 1;
        }
    }
    const int per_line = (g.d == 2) ? g.n : 8;
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        out << format_value(g.values[i]);
        out << ((int(i % std::size_t(per_line)) == per_line - 1) ? '\n' : ' ');
    }
    if (g.values.size() % std::size_t(per_line) != 0) out << '\n';
    if (!out) throw error("write_pgrid: write failed for " + path);
}

void write_pgm(const std::string& path, const GridSignal& g) {
    if (g.d != 2) throw error("write_pgm: d=2 only");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("write_pgm: cannot open " + path);
    double lo = g.values[0], hi = g.values[0];
    for (double v : g.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = (hi > lo) ? hi - lo : 1.0;
    out << "P5\n" << g.n << ' ' << g.n << "\n255\n";
    std::vector<unsigned char> row(std::size_t(g.n));
    for (int ix = 0; ix < g.n; ++ix) {
        for (int iy = 0; iy < g.n; ++iy) {
            double s = (g.at(ix, iy) - lo) / span;
            row[std::size_t(iy)] = static_cast<unsigned char>(std::lround(255.0 * s));
        }
        out.write(reinterpret_cast<const char*>(row.data()), g.n);
    }
    if (!out) throw error("write_pgm: write failed for " + path);
}

}  // namespace miscat
