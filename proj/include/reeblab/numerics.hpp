#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace reeblab {

/// Gauss-Legendre nodes and weights on [a,b].
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};

Quadrature gauss_legendre(int n, double a, double b);

/// Midpoint rule on [a,b] (spectral for periodic integrands).
Quadrature midpoint(int n, double a, double b);

/// Chebyshev-Lobatto nodes on [a,b], ascending (x0 = a, xn = b).
std::vector<double> chebyshev_lobatto(int n_nodes, double a, double b);

/// Barycentric weights for a node set (any distinct nodes).
std::vector<double> barycentric_weights(const std::vector<double>& x);

/// Barycentric Lagrange interpolation of (x,f) at xq.
double barycentric_eval(const std::vector<double>& x, const std::vector<double>& w,
                        const std::vector<double>& f, double xq);

/// Dense differentiation matrix for a node set (rows: derivative at node i).
std::vector<std::vector<double>> differentiation_matrix(const std::vector<double>& x);

/// Clenshaw-Curtis weights for Chebyshev-Lobatto nodes on [a,b].
std::vector<double> clenshaw_curtis_weights(int n_nodes, double a, double b);

/// Derivative of periodic samples (period 1, equispaced, n even) by DFT.
std::vector<double> fourier_derivative(const std::vector<double>& f);

/// Trigonometric interpolation of periodic samples at point t in [0,1).
double fourier_eval(const std::vector<double>& f, double t);

/// Scalar root solving: bisection to xtol then Newton polish with fprime.
/// Requires g(lo), g(hi) of opposite sign.
double solve_bisect_newton(const std::function<double(double)>& g,
                           const std::function<double(double)>& gprime,
                           double lo, double hi, double xtol = 1e-12);

/// Deterministic scrambled low-discrepancy points on S^3 (prefix-stable).
struct SpherePoints {
    static std::vector<std::array<double, 4>> generate(int n);
};

/// 64-bit splitmix, used wherever a cheap deterministic stream is enough.
struct SplitMix64 {
    uint64_t state;
    explicit SplitMix64(uint64_t seed) : state(seed) {}
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return (next() >> 11) * 0x1.0p-53; }   // [0,1)
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
};

} // namespace reeblab
