#pragma once

#include <optional>
#include <vector>

#include "levy/models.hpp"
#include "levy/quadrature.hpp"

namespace levy {

struct WhOptions {
    double eps = 1e-12;      // target accuracy of the factor integrals
    double wing = 0.25 * pi; // wing angle of the factor contours
    double apex_frac = 0.55; // apex position as a fraction of sigma+-(q)
    double k_d = 0.75;       // strip-width safety factor
};

/// Roots -i beta^-+_q of q + psi = 0 and the induced strip (sigma_-, sigma_+),
/// without building any contours.
struct WhRoots {
    std::optional<double> beta_minus, beta_plus;
    double sigma_plus = 0, sigma_minus = 0;
};
WhRoots wh_roots(const CharExponent& model, double q);

/// Wiener-Hopf factors phi^+-_q for one fixed q > 0.
///
/// phi^+ is evaluated directly through the exp-Cauchy integral over a contour
/// with wings down (below its half-plane of analyticity Im xi > sigma_-(q)),
/// phi^- over a contour with wings up; outside the native half-plane the
/// factorization identity q / ((q + psi) phi^{+-}) continues each factor.
class WhFactorField {
public:
    WhFactorField(const CharExponent& model, double q, const WhOptions& opt = {});

    double q() const { return q_; }
    const CharExponent& model() const { return model_; }

    /// strip bounds: sigma_-(q) < 0 < sigma_+(q); equal to the root ordinate
    /// when the root -i beta^-+_q exists, otherwise to the cut end
    double sigma_plus() const { return sigma_plus_; }
    double sigma_minus() const { return sigma_minus_; }

    /// roots of q + psi(-i beta) = 0 in the paper's sign convention:
    /// beta_minus in (-lambda_+, 0), beta_plus in (0, -lambda_-)
    std::optional<double> beta_minus() const { return beta_minus_; }
    std::optional<double> beta_plus() const { return beta_plus_; }

    cplx phi_plus(cplx xi) const;
    cplx phi_minus(cplx xi) const;
    cplx phi_plus_direct(cplx xi) const;
    cplx phi_minus_direct(cplx xi) const;

    /// residue of the analytically continued phi^- at its pole i sigma_+
    /// (exists when beta_minus does); equals q / (psi'(i sigma_+) phi^+(i sigma_+))
    cplx phi_minus_residue_upper() const;
    /// residue of the continued phi^+ at i sigma_-
    cplx phi_plus_residue_lower() const;

    const TrapezoidGrid& grid_minus() const { return grid_m_; }
    const TrapezoidGrid& grid_plus() const { return grid_p_; }
    const SinhContour& contour_minus() const { return cont_m_; }
    const SinhContour& contour_plus() const { return cont_p_; }

private:
    void find_roots();
    void build_side(bool upper);
    cplx exp_cauchy(cplx xi, const std::vector<cplx>& eta, const std::vector<cplx>& coef,
                    double sign) const;

    CharExponent model_;
    double q_;
    WhOptions opt_;
    std::optional<double> beta_minus_, beta_plus_;
    double sigma_plus_ = 0, sigma_minus_ = 0;
    SinhContour cont_m_, cont_p_;
    TrapezoidGrid grid_m_, grid_p_;
    std::vector<cplx> eta_m_, coef_m_;  // contour with wings down (defines phi^+)
    std::vector<cplx> eta_p_, coef_p_;  // contour with wings up (defines phi^-)
};

/// Enhanced representations of Appendix-style normalized integrands for
/// finite-variation and diffusion cases; falls back to the plain field when no
/// case applies (used_fallback reports it).
cplx wh_factor_extended(const WhFactorField& field, bool plus, cplx xi,
                        bool* used_fallback = nullptr);

}  // namespace levy
