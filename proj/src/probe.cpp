#include "miscat/probe.hpp"

#include <cmath>

namespace miscat {

double Poly::eval(double u) const {
    double acc = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * u + coeffs[i];
    return acc;
}

Poly Poly::derivative() const {
    Poly out;
    if (coeffs.size() <= 1) {
        out.coeffs = {0.0};
        return out;
    }
    out.coeffs.resize(coeffs.size() - 1);
    for (std::size_t k = 1; k < coeffs.size(); ++k) out.coeffs[k - 1] = double(k) * coeffs[k];
    return out;
}

Poly Poly::derivative(int order) const {
    Poly out = *this;
    for (int i = 0; i < order; ++i) out = out.derivative();
    return out;
}

Poly poly_mul(const Poly& p, const Poly& q) {
    Poly out;
    out.coeffs.assign(p.coeffs.size() + q.coeffs.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.coeffs.size(); ++i)
        for (std::size_t j = 0; j < q.coeffs.size(); ++j)
            out.coeffs[i + j] += p.coeffs[i] * q.coeffs[j];
    return out;
}

Poly bump_poly(int beta) {
    if (beta < 0) throw error("bump_poly: beta must be >= 0");
    const int m = beta + 1;
    // (1-u)^m expanded, then shifted by u^m
    Poly out;
    out.coeffs.assign(std::size_t(2 * m) + 1, 0.0);
    double binom = 1.0;
    for (int k = 0; k <= m; ++k) {
        out.coeffs[std::size_t(m + k)] = ((k % 2) ? -binom : binom);
        binom = binom * double(m - k) / double(k + 1);
    }
    return out;
}

double TensorProbe::eval(const std::vector<double>& x) const {
    if (int(x.size()) != d) throw error("TensorProbe::eval: dimension mismatch");
    double acc = 1.0;
    for (int i = 0; i < d; ++i) {
        if (x[std::size_t(i)] < 0.0 || x[std::size_t(i)] > 1.0) return 0.0;
        acc *= axis[std::size_t(i)].eval(x[std::size_t(i)]);
    }
    return acc;
}

TensorProbe make_probe(int d, int beta) {
    if (d < 1) throw error("make_probe: d must be >= 1");
    TensorProbe p;
    p.d = d;
    p.beta = beta;
    p.axis.assign(std::size_t(d), bump_poly(beta));
    return p;
}

TensorProbe probe_derivative(const TensorProbe& p, const std::vector<int>& orders) {
    if (int(orders.size()) != p.d) throw error("probe_derivative: order list size mismatch");
    TensorProbe out = p;
    for (int i = 0; i < p.d; ++i)
        out.axis[std::size_t(i)] = p.axis[std::size_t(i)].derivative(orders[std::size_t(i)]);
    return out;
}

namespace {

// integral over [0,1] of p*q by monomial integration
double poly_inner_01(const Poly& p, const Poly& q) {
    Poly prod = poly_mul(p, q);
    double acc = 0.0;
    for (std::size_t k = 0; k < prod.coeffs.size(); ++k)
        acc += prod.coeffs[k] / double(k + 1);
    return acc;
}

}  // namespace

double probe_inner(const TensorProbe& p, const TensorProbe& q) {
    if (p.d != q.d) throw error("probe_inner: dimension mismatch");
    double acc = 1.0;
    for (int i = 0; i < p.d; ++i)
        acc *= poly_inner_01(p.axis[std::size_t(i)], q.axis[std::size_t(i)]);
    return acc;
}

double probe_l2_norm(const TensorProbe& p) { return std::sqrt(probe_inner(p, p)); }

std::vector<double> probe_samples(const TensorProbe& p, int k) {
    if (k < 1) throw error("probe_samples: k must be >= 1");
    std::vector<double> out;
    if (p.d == 1) {
        out.resize(std::size_t(k));
        for (int i = 0; i < k; ++i)
            out[std::size_t(i)] = p.axis[0].eval((double(i) + 0.5) / double(k));
        return out;
    }
    if (p.d != 2) throw error("probe_samples: only d=1 and d=2 supported");
    std::vector<double> ax(std::size_t(k), 0.0), ay(std::size_t(k), 0.0);
    for (int i = 0; i < k; ++i) {
        double u = (double(i) + 0.5) / double(k);
        ax[std::size_t(i)] = p.axis[0].eval(u);
        ay[std::size_t(i)] = p.axis[1].eval(u);
    }
    out.resize(std::size_t(k) * std::size_t(k));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) out[std::size_t(i) * k + j] = ax[std::size_t(i)] * ay[std::size_t(j)];
    return out;
}

}  // namespace miscat
