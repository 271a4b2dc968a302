#include "reeblab/numerics.hpp"

#include <cmath>
#include <stdexcept>

#include "reeblab/geometry.hpp"

namespace reeblab {

Quadrature gauss_legendre(int n, double a, double b) {
    // Newton iteration on Legendre polynomials, nodes in ascending order.
    Quadrature q;
    q.nodes.resize(n);
    q.weights.resize(n);
    int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
        q.nodes[i] = xm - xl * x;
        q.nodes[n - 1 - i] = xm + xl * x;
        double w = 2.0 * xl / ((1.0 - x * x) * pp * pp);
        q.weights[i] = w;
        q.weights[n - 1 - i] = w;
    }
    return q;
}

Quadrature midpoint(int n, double a, double b) {
    Quadrature q;
    q.nodes.resize(n);
    q.weights.assign(n, (b - a) / n);
    for (int i = 0; i < n; ++i) q.nodes[i] = a + (b - a) * (i + 0.5) / n;
    return q;
}

std::vector<double> chebyshev_lobatto(int n_nodes, double a, double b) {
    std::vector<double> x(n_nodes);
    int n = n_nodes - 1;
    for (int j = 0; j <= n; ++j)
        x[j] = a + (b - a) * 0.5 * (1.0 - std::cos(kPi * j / n));
    return x;
}

std::vector<double> barycentric_weights(const std::vector<double>& x) {
    int n = (int)x.size();
    std::vector<double> w(n, 1.0);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            if (k != j) w[j] /= (x[j] - x[k]);
        }
    }
    // rescale to tame overflow for larger n
    double mx = 0;
    for (double v : w) mx = std::max(mx, std::abs(v));
    for (double& v : w) v /= mx;
    return w;
}

double barycentric_eval(const std::vector<double>& x, const std::vector<double>& w,
                        const std::vector<double>& f, double xq) {
    double num = 0, den = 0;
    for (size_t j = 0; j < x.size(); ++j) {
        double d = xq - x[j];
        if (std::abs(d) < 1e-300) return f[j];
        double t = w[j] / d;
        num += t * f[j];
        den += t;
    }
    return num / den;
}

std::vector<std::vector<double>> differentiation_matrix(const std::vector<double>& x) {
    int n = (int)x.size();
    auto w = barycentric_weights(x);
    std::vector<std::vector<double>> D(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        double diag = 0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            D[i][j] = (w[j] / w[i]) / (x[i] - x[j]);
            diag -= D[i][j];
        }
        D[i][i] = diag;
    }
    return D;
}

std::vector<double> clenshaw_curtis_weights(int n_nodes, double a, double b) {
    int n = n_nodes - 1;
    std::vector<double> w(n_nodes, 0.0);
    for (int j = 0; j <= n; ++j) {
        double s = 1.0;
        for (int k = 1; k <= n / 2; ++k) {
            double bk = (2 * k == n) ? 1.0 : 2.0;
            s -= bk * std::cos(2.0 * k * kPi * j / n) / (4.0 * k * k - 1.0);
        }
        double cj = (j == 0 || j == n) ? 1.0 : 2.0;
        w[j] = cj * s / n;
    }
    double scale = 0.5 * (b - a);
    for (double& v : w) v *= scale;
    return w;
}

std::vector<double> fourier_derivative(const std::vector<double>& f) {
    // Naive DFT differentiation; n is small (<= 256) everywhere we use this.
    int n = (int)f.size();
    std::vector<double> re(n, 0.0), im(n, 0.0);
    for (int k = 0; k <= n / 2; ++k) {
        double cr = 0, ci = 0;
        for (int j = 0; j < n; ++j) {
            double ang = -kTwoPi * k * j / n;
            cr += f[j] * std::cos(ang);
            ci += f[j] * std::sin(ang);
        }
        re[k] = cr / n;
        im[k] = ci / n;
    }
    std::vector<double> df(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int k = 1; k < n / 2; ++k) {
            double ang = kTwoPi * k * j / n;
            // d/dt of 2*(re cos(2pi k t) - im sin(2pi k t)), period 1
            s += 2.0 * kTwoPi * k * (-re[k] * std::sin(ang) - im[k] * std::cos(ang));
        }
        // Nyquist mode has zero derivative contribution at the nodes (cos only)
        df[j] = s;
    }
    return df;
}

double fourier_eval(const std::vector<double>& f, double t) {
    // trigonometric barycentric interpolation on equispaced nodes (n even)
    int n = (int)f.size();
    double num = 0, den = 0;
    for (int j = 0; j < n; ++j) {
        double d = t - double(j) / n;
        d -= std::round(d);
        if (std::abs(d) < 1e-14) return f[j];
        double w = ((j & 1) ? -1.0 : 1.0) / std::tan(kPi * d);
        num += w * f[j];
        den += w;
    }
    return num / den;
}

double solve_bisect_newton(const std::function<double(double)>& g,
                           const std::function<double(double)>& gprime,
                           double lo, double hi, double xtol) {
    double glo = g(lo), ghi = g(hi);
    if (glo == 0) return lo;
    if (ghi == 0) return hi;
    if (glo * ghi > 0) throw std::invalid_argument("solve_bisect_newton: no sign change");
    // coarse bisection
    for (int i = 0; i < 40 && (hi - lo) > 64 * xtol; ++i) {
        double mid = 0.5 * (lo + hi);
        double gm = g(mid);
        if (gm == 0) return mid;
        if (glo * gm < 0) {
            hi = mid;
        } else {
            lo = mid;
            glo = gm;
        }
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 30; ++i) {
        double gx = g(x);
        double dgx = gprime(x);
        if (dgx == 0) break;
        double step = gx / dgx;
        double xn = x - step;
        if (xn < lo || xn > hi) xn = 0.5 * (lo + hi);  // fall back inside bracket
        if (g(xn) * glo < 0)
            hi = xn;
        else
            lo = xn;
        if (std::abs(xn - x) < xtol) return xn;
        x = xn;
    }
    return x;
}

std::vector<std::array<double, 4>> SpherePoints::generate(int n) {
    // Fixed-seed stream of uniform points on S^3; prefix of a longer run is
    // reproducible, which keeps sup-norm estimates monotone under refinement.
    SplitMix64 rng(0x5eeb1ab5eeb1ab01ull);
    std::vector<std::array<double, 4>> pts;
    pts.reserve(n);
    while ((int)pts.size() < n) {
        // Box-Muller pairs -> Gaussian 4-vector -> normalize
        double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform(), u4 = rng.uniform();
        if (u1 < 1e-300 || u3 < 1e-300) continue;
        double r1 = std::sqrt(-2 * std::log(u1)), r2 = std::sqrt(-2 * std::log(u3));
        std::array<double, 4> g{r1 * std::cos(kTwoPi * u2), r1 * std::sin(kTwoPi * u2),
                                r2 * std::cos(kTwoPi * u4), r2 * std::sin(kTwoPi * u4)};
        double nn = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2] + g[3] * g[3]);
        if (nn < 1e-12) continue;
        for (double& v : g) v /= nn;
        pts.push_back(g);
    }
    return pts;
}

std::array<Vec4, 3> tangent_basis(const Vec4& q) {
    // Gram-Schmidt of the three coordinate axes least aligned with q.
    int drop = 0;
    for (int i = 1; i < 4; ++i)
        if (std::abs(q[i]) > std::abs(q[drop])) drop = i;
    std::array<Vec4, 3> b;
    int k = 0;
    for (int i = 0; i < 4; ++i) {
        if (i == drop) continue;
        Vec4 e;
        e[i] = 1.0;
        e += (-e.dot(q)) * q;
        for (int j = 0; j < k; ++j) e += (-e.dot(b[j])) * b[j];
        b[k++] = e * (1.0 / e.norm());
    }
    return b;
}

Mat4 Mat4::su2(Cplx a, Cplx b) {
    // columns act on (z1,z2): U e1 = (a,b), U e2 = (-conj(b), conj(a))
    auto col = [](Cplx z1, Cplx z2) { return Vec4::from_complex(z1, z2); };
    Vec4 c1 = col(a, b);
    Vec4 c2 = col(-std::conj(b), std::conj(a));
    // complex-linear: images of e_x and e_y = i*e_x columns
    Mat4 M;
    Vec4 ic1 = Vec4::from_complex(Cplx(0, 1) * a, Cplx(0, 1) * b);
    Vec4 ic2 = Vec4::from_complex(Cplx(0, 1) * -std::conj(b), Cplx(0, 1) * std::conj(a));
    for (int i = 0; i < 4; ++i) {
        M.m[i][0] = c1[i];
        M.m[i][1] = ic1[i];
        M.m[i][2] = c2[i];
        M.m[i][3] = ic2[i];
    }
    return M;
}

} // namespace reeblab
