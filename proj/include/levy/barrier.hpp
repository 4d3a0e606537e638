#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>

#include "levy/laplace.hpp"
#include "levy/models.hpp"
#include "levy/transforms.hpp"
#include "levy/wienerhopf.hpp"

namespace levy {

struct BarrierOptions {
    double eps = 1e-10;          // quadrature tolerance of the Laplace-domain integrals
    GaverScheme gs{GaverScheme::Mode::GWR, GaverScheme::Depth::PaperDepth, 8, 16};
    double mesh_safety = 0.7;    // mesh shrink factor for the inversion integrals
    double cross_threshold = 0.1;  // cross -i beta^-_q when lambda_+ - sigma_+ > threshold*lambda_+
    int sbp_iterations = 3;      // summation-by-parts passes on flat axes
    int threads = 1;
};

/// One leg of a first-touch product: a vanilla option or the power payoff
/// e^{beta X_tau} (beta = 0 is the first-touch digital).
struct ProductLeg {
    enum class Type { VanillaLeg, PowerLeg };
    Type type = Type::PowerLeg;
    OptionKind kind = OptionKind::Call;
    double strike = 1.0;
    double beta = 0.0;
    static ProductLeg vanilla(OptionKind k, double K) { return {Type::VanillaLeg, k, K, 0.0}; }
    static ProductLeg power(double beta) {
        return {Type::PowerLeg, OptionKind::Call, 1.0, beta};
    }
};

/// Laplace-domain pricer for one (model, r, h); builds and caches the
/// Wiener-Hopf machinery per q on the Gaver-Stehfest grid.
class LaplacePricer {
public:
    LaplacePricer(const CharExponent& model, double r, double h, const BarrierOptions& opt = {});
    ~LaplacePricer();

    const CharExponent& model() const { return model_; }
    double rate() const { return r_; }
    double barrier() const { return h_; }
    const BarrierOptions& options() const { return opt_; }

    /// Laplace transform of the no-touch value e^{rate_mult rT} V_nt(T,x) at q,
    /// for a payoff transform truncated below h (pole-crossed sinh form).
    cplx notouch_laplace(double q, double x, const PayoffTransform& transform) const;

    /// two-residue closed-form approximation of notouch_laplace (both roots must
    /// exist, x-h and |a-x| not small)
    cplx asymptotic_notouch(double q, double x, const PayoffTransform& transform) const;

    /// E^x[e^{-q tau}]
    double survival_transform(double q, double x) const;

    /// Laplace transform of e^{R T} E^x[e^{-R tau + beta X_tau} 1_{tau<T}] with
    /// R = discount; query at q
    cplx ft_power_laplace(double q, double x, double beta, double discount) const;

    /// Laplace transform of the first-touch leg of an embedded claim
    /// e^{-c theta} e^{beta_shift y} V_vanilla(theta, y) at touch, discount R
    cplx ft_embedded_laplace(double q, double x, OptionKind kind, double K, double discount,
                             double theta_discount = 0.0, double beta_shift = 0.0,
                             bool with_vanilla = true) const;

    /// Laplace transform of the first-touch product of two vanilla value functions
    cplx ft_product_laplace(double q, double x, const Vanilla& a, const Vanilla& b) const;

    /// time-domain prices via GWR
    double notouch_price(double T, double x, const PayoffTransform& truncated, int rate_mult) const;
    double invert(double T, const std::function<cplx(double)>& vtilde, double discount) const;

    const WhFactorField& field(double q) const;

private:
    struct QData;
    QData& qdata(double q) const;

    CharExponent model_;
    double r_, h_;
    BarrierOptions opt_;
    mutable std::map<double, std::unique_ptr<QData>> cache_;
};

struct Digitals {
    double v_nt = 0, v_ft = 0;
};

Digitals barrier_digitals(const CharExponent& model, double r, double h, double T, double x,
                          const BarrierOptions& opt = {});

/// E^x[e^{-(rate_mult r) tau + beta X_tau} 1_{tau<T}]
double ft_power(const CharExponent& model, double r, double h, double T, double x, double beta,
                int rate_mult = 1, const BarrierOptions& opt = {});

/// first-touch leg of a down-and-in vanilla: E^x[e^{-r tau} V(K; T-tau, X_tau) 1_{tau<T}]
double ft_embedded_vanilla(const CharExponent& model, double r, double h, double T, double x,
                           OptionKind kind, double K, const BarrierOptions& opt = {});

/// E^x[e^{-2 r tau} V_left(T-tau, X_tau) V_right(T-tau, X_tau) 1_{tau<T}]
double ft_product(const CharExponent& model, double r, double h, double T, double x,
                  const ProductLeg& left, const ProductLeg& right, const BarrierOptions& opt = {});

/// down-and-out price of a payoff (transform truncated below h internally)
double notouch_price(const CharExponent& model, double r, double h, double T, double x,
                     const PiecewiseExpPayoff& payoff, int rate_mult = 1,
                     const BarrierOptions& opt = {});

double down_and_out_call(const CharExponent& model, double r, double h, double T, double x,
                         double K, const BarrierOptions& opt = {});

}  // namespace levy
