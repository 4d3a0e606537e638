#pragma once

#include <optional>

#include "levy/common.hpp"

namespace levy {

enum class Family { BM, KoBoL, KoBoLGeneral, NTS, BMKoBoL };

/// Characteristic exponent of a one-factor exponential Levy model,
/// E[exp(i xi X_t)] = exp(-t psi(xi)), analytic in the complex plane with
/// the cuts i(-inf, lambda_minus] and i[lambda_plus, +inf).
class CharExponent {
public:
    static CharExponent bm(double sigma2, double mu);
    static CharExponent kobol(double nu, double c, double lambda_minus, double lambda_plus,
                              double mu);
    static CharExponent kobol_general(double nu_plus, double c_plus, double nu_minus,
                                      double c_minus, double lambda_minus, double lambda_plus,
                                      double mu);
    static CharExponent nts(double nu, double delta, double alpha, double beta, double mu);
    static CharExponent bm_kobol(double sigma2, double mu, double nu, double c,
                                 double lambda_minus, double lambda_plus);

    cplx psi(cplx xi) const;
    /// psi with the drift removed: psi0(xi) = psi(xi) + i mu xi
    cplx psi0(cplx xi) const;
    /// analytic derivative psi'(xi)
    cplx dpsi(cplx xi) const;

    Family family() const { return family_; }
    double mu() const { return mu_; }
    double sigma2() const { return sigma2_; }
    double lambda_minus() const { return lambda_minus_; }
    double lambda_plus() const { return lambda_plus_; }
    /// order of the process (exponent nu in the |xi|^nu growth of psi0)
    double order() const;
    /// asymptotic coefficient c0_inf of psi0 along the real axis
    double c0inf() const;
    /// psi''(0), the second instantaneous moment
    double second_moment() const;

    bool has_diffusion() const { return sigma2_ > 0; }
    bool has_jumps() const;

    double nu() const { return nu_; }
    double c() const { return c_; }

private:
    CharExponent() = default;
    void check_cuts(cplx xi) const;

    Family family_ = Family::BM;
    double mu_ = 0, sigma2_ = 0;
    double nu_ = 0, c_ = 0;                      // KoBoL / BMKoBoL
    double nu_p_ = 0, c_p_ = 0, nu_m_ = 0, c_m_ = 0;  // KoBoLGeneral
    double alpha_ = 0, beta_n_ = 0, delta_ = 0;  // NTS
    double lambda_minus_ = 0, lambda_plus_ = 0;
    double gm_nu_ = 0, gm_nu_p_ = 0, gm_nu_m_ = 0;  // cached Gamma(-nu)
};

/// KoBoL intensity c matching a target second instantaneous moment m2,
/// with a diffusion contribution sigma2 already present.
double calibrate_c(double m2, double nu, double lambda_minus, double lambda_plus, double sigma2);

/// riskless rate from the EMM condition psi(-i) + r = 0
double emm_rate(const CharExponent& model);

/// beta with psi(xi) = psi(-xi - i beta) for all xi, when the family admits it
std::optional<double> symmetry_beta(const CharExponent& model);

}  // namespace levy
