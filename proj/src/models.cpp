#include "levy/models.hpp"

#include <cmath>
#include <limits>

namespace levy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double gamma_neg(double nu) {
    // tgamma handles negative non-integer arguments
    return std::tgamma(-nu);
}

void require_kobol_order(double nu) {
    if (!(nu > 0.0 && nu < 2.0)) throw DomainError("KoBoL order nu must lie in (0,2)");
    if (std::abs(nu - 1.0) < 1e-12)
        throw DomainError("KoBoL with nu=1 has a different analytic form and is not supported");
}

}  // namespace

CharExponent CharExponent::bm(double sigma2, double mu) {
    if (sigma2 < 0) throw DomainError("sigma2 must be nonnegative");
    CharExponent m;
    m.family_ = Family::BM;
    m.sigma2_ = sigma2;
    m.mu_ = mu;
    m.lambda_minus_ = -kInf;
    m.lambda_plus_ = kInf;
    return m;
}

CharExponent CharExponent::kobol(double nu, double c, double lambda_minus, double lambda_plus,
                                 double mu) {
    require_kobol_order(nu);
    if (!(c > 0)) throw DomainError("KoBoL intensity c must be positive");
    if (!(lambda_minus < 0 && lambda_plus > 0))
        throw DomainError("KoBoL requires lambda_minus < 0 < lambda_plus");
    CharExponent m;
    m.family_ = Family::KoBoL;
    m.nu_ = nu;
    m.c_ = c;
    m.lambda_minus_ = lambda_minus;
    m.lambda_plus_ = lambda_plus;
    m.mu_ = mu;
    m.gm_nu_ = gamma_neg(nu);
    return m;
}

CharExponent CharExponent::kobol_general(double nu_plus, double c_plus, double nu_minus,
                                         double c_minus, double lambda_minus, double lambda_plus,
                                         double mu) {
    require_kobol_order(nu_plus);
    require_kobol_order(nu_minus);
    if (c_plus < 0 || c_minus < 0 || c_plus + c_minus <= 0)
        throw DomainError("KoBoL intensities must be nonnegative with c+ + c- > 0");
    if (!(lambda_minus < 0 && lambda_plus > 0))
        throw DomainError("KoBoL requires lambda_minus < 0 < lambda_plus");
    CharExponent m;
    m.family_ = Family::KoBoLGeneral;
    m.nu_p_ = nu_plus;
    m.c_p_ = c_plus;
    m.nu_m_ = nu_minus;
    m.c_m_ = c_minus;
    m.lambda_minus_ = lambda_minus;
    m.lambda_plus_ = lambda_plus;
    m.mu_ = mu;
    m.gm_nu_p_ = gamma_neg(nu_plus);
    m.gm_nu_m_ = gamma_neg(nu_minus);
    m.nu_ = std::max(nu_plus, nu_minus);
    return m;
}

CharExponent CharExponent::nts(double nu, double delta, double alpha, double beta, double mu) {
    if (!(nu > 0 && nu < 2)) throw DomainError("NTS order nu must lie in (0,2)");
    if (!(delta > 0)) throw DomainError("NTS delta must be positive");
    if (!(std::abs(beta) < alpha)) throw DomainError("NTS requires |beta| < alpha");
    CharExponent m;
    m.family_ = Family::NTS;
    m.nu_ = nu;
    m.alpha_ = alpha;
    m.beta_n_ = beta;
    m.delta_ = delta;
    m.mu_ = mu;
    m.lambda_minus_ = -alpha - beta;
    m.lambda_plus_ = alpha - beta;
    return m;
}

CharExponent CharExponent::bm_kobol(double sigma2, double mu, double nu, double c,
                                    double lambda_minus, double lambda_plus) {
    require_kobol_order(nu);
    if (sigma2 < 0) throw DomainError("sigma2 must be nonnegative");
    if (!(c > 0)) throw DomainError("KoBoL intensity c must be positive");
    if (!(lambda_minus < 0 && lambda_plus > 0))
        throw DomainError("KoBoL requires lambda_minus < 0 < lambda_plus");
    CharExponent m;
    m.family_ = Family::BMKoBoL;
    m.sigma2_ = sigma2;
    m.mu_ = mu;
    m.nu_ = nu;
    m.c_ = c;
    m.lambda_minus_ = lambda_minus;
    m.lambda_plus_ = lambda_plus;
    m.gm_nu_ = gamma_neg(nu);
    return m;
}

bool CharExponent::has_jumps() const { return family_ != Family::BM; }

void CharExponent::check_cuts(cplx xi) const {
    if (xi.real() != 0.0) return;
    if (xi.imag() >= lambda_plus_)
        throw DomainError("psi evaluated on the upper cut i[lambda_plus, +inf)");
    if (xi.imag() <= lambda_minus_)
        throw DomainError("psi evaluated on the lower cut i(-inf, lambda_minus]");
}

cplx CharExponent::psi(cplx xi) const { return psi0(xi) - iu * mu_ * xi; }

cplx CharExponent::psi0(cplx xi) const {
    check_cuts(xi);
    const cplx ixi = iu * xi;
    cplx v = 0.5 * sigma2_ * xi * xi;
    switch (family_) {
        case Family::BM:
            break;
        case Family::KoBoL:
        case Family::BMKoBoL: {
            const double lp = lambda_plus_, lm = lambda_minus_;
            v += c_ * gm_nu_ *
                 (std::pow(lp, nu_) - std::pow(lp + ixi, nu_) + std::pow(-lm, nu_) -
                  std::pow(-lm - ixi, nu_));
            break;
        }
        case Family::KoBoLGeneral: {
            const double lp = lambda_plus_, lm = lambda_minus_;
            v += c_p_ * gm_nu_p_ * (std::pow(lp, nu_p_) - std::pow(lp + ixi, nu_p_));
            v += c_m_ * gm_nu_m_ * (std::pow(-lm, nu_m_) - std::pow(-lm - ixi, nu_m_));
            break;
        }
        case Family::NTS: {
            const cplx z = xi + iu * beta_n_;
            v += delta_ * (std::pow(alpha_ * alpha_ + z * z, 0.5 * nu_) -
                           std::pow(alpha_ * alpha_ - beta_n_ * beta_n_, 0.5 * nu_));
            break;
        }
    }
    return v;
}

cplx CharExponent::dpsi(cplx xi) const {
    check_cuts(xi);
    const cplx ixi = iu * xi;
    cplx v = sigma2_ * xi - iu * mu_;
    switch (family_) {
        case Family::BM:
            break;
        case Family::KoBoL:
        case Family::BMKoBoL: {
            const double lp = lambda_plus_, lm = lambda_minus_;
            v += c_ * gm_nu_ * nu_ *
                 (-iu * std::pow(lp + ixi, nu_ - 1.0) + iu * std::pow(-lm - ixi, nu_ - 1.0));
            break;
        }
        case Family::KoBoLGeneral: {
            const double lp = lambda_plus_, lm = lambda_minus_;
            v += c_p_ * gm_nu_p_ * nu_p_ * (-iu * std::pow(lp + ixi, nu_p_ - 1.0));
            v += c_m_ * gm_nu_m_ * nu_m_ * (iu * std::pow(-lm - ixi, nu_m_ - 1.0));
            break;
        }
        case Family::NTS: {
            const cplx z = xi + iu * beta_n_;
            v += delta_ * 0.5 * nu_ * std::pow(alpha_ * alpha_ + z * z, 0.5 * nu_ - 1.0) * 2.0 * z;
            break;
        }
    }
    return v;
}

double CharExponent::order() const {
    if (sigma2_ > 0) return 2.0;
    return nu_;
}

double CharExponent::c0inf() const {
    if (sigma2_ > 0) return 0.5 * sigma2_;
    switch (family_) {
        case Family::KoBoL:
            return -2.0 * c_ * gm_nu_ * std::cos(0.5 * pi * nu_);
        case Family::KoBoLGeneral: {
            // dominant order side; equal orders add
            double v = 0;
            if (nu_p_ >= nu_m_) v += -c_p_ * gm_nu_p_ * std::cos(0.5 * pi * nu_p_);
            if (nu_m_ >= nu_p_) v += -c_m_ * gm_nu_m_ * std::cos(0.5 * pi * nu_m_);
            return 2.0 * v * 0.5 * ((nu_p_ == nu_m_) ? 2.0 : 1.0);
        }
        case Family::NTS:
            return delta_;
        default:
            return 0.5 * sigma2_;
    }
}

double CharExponent::second_moment() const {
    double v = sigma2_;
    switch (family_) {
        case Family::KoBoL:
        case Family::BMKoBoL:
            v += c_ * std::tgamma(2.0 - nu_) *
                 (std::pow(lambda_plus_, nu_ - 2.0) + std::pow(-lambda_minus_, nu_ - 2.0));
            break;
        case Family::KoBoLGeneral:
            v += c_p_ * std::tgamma(2.0 - nu_p_) * std::pow(lambda_plus_, nu_p_ - 2.0);
            v += c_m_ * std::tgamma(2.0 - nu_m_) * std::pow(-lambda_minus_, nu_m_ - 2.0);
            break;
        case Family::NTS: {
            // psi0''(0) for the NTS exponent
            const double a2b2 = alpha_ * alpha_ - beta_n_ * beta_n_;
            v += delta_ * nu_ *
                 (std::pow(a2b2, 0.5 * nu_ - 1.0) +
                  (nu_ - 2.0) * beta_n_ * beta_n_ * std::pow(a2b2, 0.5 * nu_ - 2.0));
            break;
        }
        default:
            break;
    }
    return v;
}

double calibrate_c(double m2, double nu, double lambda_minus, double lambda_plus, double sigma2) {
    if (sigma2 < 0) throw DomainError("sigma2 must be nonnegative");
    if (m2 == sigma2) return 0.0;
    if (!(m2 > sigma2)) throw CalibrationError("m2 must exceed the diffusion contribution sigma2");
    require_kobol_order(nu);
    const double denom = std::tgamma(2.0 - nu) * (std::pow(lambda_plus, nu - 2.0) +
                                                  std::pow(-lambda_minus, nu - 2.0));
    const double c = (m2 - sigma2) / denom;
    if (!(c > 0) || !std::isfinite(c)) throw CalibrationError("calibrated c is not positive");
    return c;
}

double emm_rate(const CharExponent& model) {
    if (!(model.lambda_minus() < -1.0))
        throw DomainError("EMM condition needs lambda_minus < -1 (e^{X_T} integrable)");
    const cplx v = model.psi(cplx(0.0, -1.0));
    if (std::abs(v.imag()) > 1e-12 * (1.0 + std::abs(v.real())))
        throw NumericError("psi(-i) is not real");
    return -v.real();
}

std::optional<double> symmetry_beta(const CharExponent& model) {
    std::optional<double> beta;
    switch (model.family()) {
        case Family::BM:
            if (model.sigma2() <= 0) return std::nullopt;
            beta = -2.0 * model.mu() / model.sigma2();
            break;
        case Family::KoBoL:
            if (model.mu() != 0.0) return std::nullopt;
            beta = -model.lambda_plus() - model.lambda_minus();
            break;
        case Family::BMKoBoL: {
            if (model.sigma2() <= 0) return std::nullopt;
            const double b_jump = -model.lambda_plus() - model.lambda_minus();
            const double b_bm = -2.0 * model.mu() / model.sigma2();
            if (std::abs(b_jump - b_bm) > 1e-10) return std::nullopt;
            beta = b_jump;
            break;
        }
        default:
            return std::nullopt;
    }
    // residual check on a grid in the strip
    const double lo = std::max(model.lambda_minus(), -50.0);
    const double hi = std::min(model.lambda_plus(), 50.0);
    for (int k = 0; k < 40; ++k) {
        const double re = -8.0 + 16.0 * k / 39.0;
        const double im = 0.25 * (lo + (hi - lo) * ((k * 7) % 40) / 39.0);
        const cplx xi(re, im);
        const cplx mirrored = -xi - iu * (*beta);
        if (mirrored.real() == 0.0) continue;
        const cplx d = model.psi(xi) - model.psi(mirrored);
        if (std::abs(d) > 1e-12 * (1.0 + std::abs(model.psi(xi)))) return std::nullopt;
    }
    return beta;
}

}  // namespace levy
