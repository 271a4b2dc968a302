#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "reeblab/forms3d.hpp"

namespace reeblab {

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double max_step = 0.05;
    bool projection = true;  // renormalise |x| after every accepted step
};

struct PeriodicOrbit {
    Point4 seed;               // point on the section image
    double period = 0;         // flow time (one deck step for lens class h)
    bool class_h = false;
    double closure_residual = 0;
    int lift_winding = 0;
    double return_derivative = 0;  // |dP - I| estimate at the fixed point (unvalidated)
};

/// Flow of the Reeb field for time t (adaptive Dormand-Prince 5(4)).
Point4 integrate(const ContactForm& alpha, const Point4& q, double t,
                 const IntegratorConfig& cfg = {});

/// Flow with a callback after every accepted step: visit(t, state).
Point4 integrate_watch(const ContactForm& alpha, const Point4& q, double t,
                       const IntegratorConfig& cfg,
                       const std::function<void(double, const Vec4&)>& visit);

/// First positive crossing of the section page by the flow through q.
/// The page for p = 1 is {Im z2 = 0, Re z2 >= 0}; for lens order p the next
/// deck-rotated page {z2 in e^{2 pi i/p} R+} is used, so the crossing realises
/// one deck step of a class-h closure.  Throws NoReturn past t = 2.
struct SectionCrossing {
    double tau;
    Point4 point;       // ambient crossing point (on the rotated page for lens)
    double event_residual;
};
SectionCrossing section_return(const ContactForm& alpha, const Point4& q,
                               const IntegratorConfig& cfg = {});

struct OrbitSearchConfig {
    double t_cap = 1.5;          // in (1,2)
    int seed_radii = 5;
    int seed_angles = 8;
    double newton_tol = 1e-10;   // accept threshold on section displacement
    double dedup_tol = 1e-5;     // orbit-distance threshold
    int max_newton_iter = 30;
    double fd_step = 1e-6;
    IntegratorConfig integ{};
};

struct OrbitSearchResult {
    std::vector<PeriodicOrbit> orbits;
    int seeds_tried = 0;
    int seeds_dropped = 0;
};

/// Newton search for class-h periodic orbits from a seed grid on the section,
/// including the boundary fiber (handled as a direct closure test).
OrbitSearchResult find_orbits(const ContactForm& alpha, const OrbitSearchConfig& cfg = {});

/// Winding of the Darboux fiber angle along the orbit (continuous lift of
/// <x(t), x(0)>).  class-h iff the lift advances by exactly one deck step.
/// Throws ChartEscape when the orbit strays too far from its fiber.
int lift_winding(const ContactForm& alpha, const Point4& seed, double period,
                 const IntegratorConfig& cfg = {}, int samples = 256);

bool class_h_test(const ContactForm& alpha, const PeriodicOrbit& orbit,
                  const IntegratorConfig& cfg = {});

/// (T_min, T_max) over the class-h orbits.  Throws EmptyOrbitSet.
std::pair<double, double> t_min_max(const std::vector<PeriodicOrbit>& orbits);

} // namespace reeblab
