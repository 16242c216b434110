#pragma once

// Polynomial bump probes on [0,1]: g(u) = u^(beta+1) (1-u)^(beta+1), tensorized
// across axes. Closed under differentiation (coefficient arithmetic is exact),
// which is what the dictionary construction needs.

#include <vector>

#include "miscat/grid.hpp"

namespace miscat {

// Dense polynomial in one variable, coeffs[k] multiplies u^k.
struct Poly {
    std::vector<double> coeffs;

    int degree() const { return int(coeffs.size()) - 1; }
    double eval(double u) const;
    Poly derivative() const;
    Poly derivative(int order) const;
};

Poly poly_mul(const Poly& p, const Poly& q);

// g(u) = u^(beta+1) (1-u)^(beta+1) as an exact coefficient vector.
Poly bump_poly(int beta);

// Tensor probe phi(x) = prod_axis g(x_axis) with per-axis derivative orders.
// eval is zero outside [0,1]^d.
struct TensorProbe {
    int d = 2;
    int beta = 4;
    std::vector<Poly> axis;  // one differentiated factor per axis

    double eval(const std::vector<double>& x) const;
};

TensorProbe make_probe(int d, int beta);
TensorProbe probe_derivative(const TensorProbe& p, const std::vector<int>& orders);

// L2 norm over [0,1]^d by exact monomial integration.
double probe_l2_norm(const TensorProbe& p);
double probe_inner(const TensorProbe& p, const TensorProbe& q);

// Samples on the k-point midpoint lattice of [0,1]^d (k per axis), the grid a
// box of side k pixels induces. Row-major, axis 0 slowest.
std::vector<double> probe_samples(const TensorProbe& p, int k);

}  // namespace miscat
