#pragma once

#include <cmath>

#include "reeblab/geometry.hpp"

namespace reeblab {

/// The surface of section N modeled as a disc with collar coordinates
/// (r, theta) in [0, a_max) x R/Z, r = 0 the boundary, and a center chart
/// w with r = sqrt(a_max^2 - |w|^2), theta = -arg(w)/(2 pi).  The model
/// Liouville form is lambda_* = (-t_sigma + r^2/2) dtheta, which equals
/// (1/4pi)(w1 dw2 - w2 dw1) on the overlap.
struct DiscModel {
    int t_sigma = 1;
    double a_max = std::sqrt(2.0);

    explicit DiscModel(int t = 1) : t_sigma(t), a_max(std::sqrt(2.0 * t)) {}

    Cplx w_of_collar(double r, double theta) const {
        double s = std::sqrt(std::max(0.0, a_max * a_max - r * r));
        return std::polar(s, -kTwoPi * theta);
    }
    std::pair<double, double> collar_of_w(Cplx w) const {
        double r = std::sqrt(std::max(0.0, a_max * a_max - std::norm(w)));
        double theta = -std::arg(w) / kTwoPi;
        if (theta < 0) theta += 1.0;
        return {r, theta};
    }

    /// lambda_* coefficient of dtheta in the collar chart.
    double lambda_star_theta(double r) const { return -t_sigma + 0.5 * r * r; }
};

/// Embedding of the section into S^3 (t_sigma = 1 only):
///   S(r,theta) = ( sqrt(1 - r^2/2) e^{-2 pi i theta}, r / sqrt 2 ).
struct SectionEmbedding {
    DiscModel disc;

    SectionEmbedding() : disc(1) {}

    Vec4 embed(double r, double theta) const {
        double r1 = std::sqrt(1.0 - 0.5 * r * r);
        Cplx z1 = std::polar(r1, -kTwoPi * theta);
        return Vec4::from_complex(z1, Cplx(r / std::sqrt(2.0), 0.0));
    }

    /// d/dr and d/dtheta of the embedding.
    std::pair<Vec4, Vec4> embed_tangent(double r, double theta) const {
        double r1 = std::sqrt(1.0 - 0.5 * r * r);
        Cplx e = std::polar(1.0, -kTwoPi * theta);
        Vec4 dr = Vec4::from_complex((-0.5 * r / r1) * e, Cplx(1.0 / std::sqrt(2.0), 0.0));
        Vec4 dth = Vec4::from_complex(Cplx(0, -kTwoPi) * r1 * e, Cplx(0, 0));
        return {dr, dth};
    }

    /// Embedding in the center chart: S_w(w) = (w / sqrt 2, sqrt(1 - |w|^2/2)).
    Vec4 embed_w(Cplx w) const {
        double x = std::sqrt(std::max(0.0, 1.0 - 0.5 * std::norm(w)));
        return Vec4::from_complex(w / std::sqrt(2.0), Cplx(x, 0.0));
    }

    /// d/dw1 and d/dw2 of the center-chart embedding.
    std::pair<Vec4, Vec4> embed_w_tangent(Cplx w) const {
        double x = std::sqrt(std::max(1e-300, 1.0 - 0.5 * std::norm(w)));
        const double s2 = std::sqrt(2.0);
        Vec4 d1 = Vec4::from_complex(Cplx(1.0 / s2, 0), Cplx(-0.5 * w.real() / x, 0));
        Vec4 d2 = Vec4::from_complex(Cplx(0, 1.0 / s2), Cplx(-0.5 * w.imag() / x, 0));
        return {d1, d2};
    }

    /// Disc coordinates of an ambient page point (must satisfy Im z2 = 0, Re z2 >= 0
    /// up to flow tolerance); returns the w coordinate.
    Cplx w_of_point(const Vec4& q) const { return std::sqrt(2.0) * q.z1(); }
};

} // namespace reeblab
