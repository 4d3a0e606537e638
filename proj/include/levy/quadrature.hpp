#pragma once

#include <functional>
#include <vector>

#include "levy/common.hpp"

namespace levy {

/// Sinh-accelerated contour: the image of the real line under
/// chi(y) = i omega1 + b sinh(i omega + y).
struct SinhContour {
    double omega1 = 0;  // imaginary offset
    double omega = 0;   // wing angle, in [-pi/2, pi/2]
    double b = 1;       // scale, > 0
    bool straight = false;  // straight horizontal line i omega1 + b y instead of the sinh map

    cplx point(double y) const {
        if (straight) return iu * omega1 + b * y;
        return iu * omega1 + b * std::sinh(cplx(y, omega));
    }
    cplx deriv(double y) const {
        if (straight) return b;
        return b * std::cosh(cplx(y, omega));
    }
    /// intersection with the imaginary axis (top point for wings down,
    /// bottom point for wings up)
    double apex() const { return omega1 + (straight ? 0.0 : b * std::sin(omega)); }
    bool wings_up() const { return omega > 0; }
    bool wings_down() const { return omega < 0; }

    static SinhContour straight_line(double omega1, double scale = 1.0) {
        SinhContour c;
        c.omega1 = omega1;
        c.b = scale;
        c.straight = true;
        return c;
    }
};

/// Uniform grid y_k = k zeta, |k| <= N, for the simplified trapezoid rule.
struct TrapezoidGrid {
    double zeta = 0.1;
    int N = 0;
    int node_count() const { return 2 * N + 1; }
};

/// Curves with wings of opposite orientation do not intersect iff the apex of
/// the upper one lies above the apex of the lower one.
inline bool contours_disjoint(const SinhContour& upper, const SinhContour& lower) {
    return upper.apex() > lower.apex();
}

struct ContourNode {
    cplx point;
    cplx deriv;
};

std::vector<ContourNode> contour_points(const SinhContour& contour, const TrapezoidGrid& grid);

/// Decay data of an integrand along a sinh contour, used by select_grid.
/// The integrand (including the contour derivative) is modelled as
///   C * |chi(y)|^{-poly_decay} * log(|chi|)^{log_growth}
///     * exp(-kappa_exp * ((b/2) e^{|y|})^{nu_exp})
/// and analytic in the y-strip of half-width strip_half_width.
struct DecayModel {
    double strip_half_width = 0.5;
    double b = 1.0;
    double kappa_exp = 0.0;
    double nu_exp = 1.0;
    double poly_decay = 0.0;
    double log_growth = 0.0;
};

/// Mesh and truncation selection for the simplified trapezoid rule.
/// Deterministic in its inputs; eps must lie in (1e-15, 1e-2).
TrapezoidGrid select_grid(const DecayModel& decay, double eps, double mesh_safety = 1.0);

/// zeta * sum_k f(chi(y_k)) chi'(y_k), summed in fixed order (k = 0, +-1, ...).
cplx trapezoid_sum(const TrapezoidGrid& grid, const SinhContour& contour,
                   const std::function<cplx(cplx)>& integrand);

/// Summation by parts for slowly decaying trapezoid sums
///   zeta * sum_j exp(-i a zeta j) f_j,
/// iterated `iterations` times with forward differences.  samples[j + N] = f_j.
cplx sum_by_parts(double zeta, double a, const std::vector<cplx>& samples, int iterations);

/// Necessary condition on the wing angles (omega_prime for the Wiener-Hopf
/// integrals, omega_dprime for a deformed Bromwich contour) so that the two
/// deformations are compatible.  Validator only.
bool bromwich_pair_feasible(double omega_prime, double omega_dprime, double nu, double mu,
                            double c_inf, double k_d = 0.9);

/// Reference flat-line trapezoid with interval doubling, used mostly by tests
/// but also by the Gram-matrix cross checks.
cplx adaptive_flat_integral(const std::function<cplx(double)>& f, double half_width, double tol,
                            int max_doublings = 24);

}  // namespace levy
