#pragma once

#include <Eigen/Dense>
#include <optional>

#include "levy/models.hpp"
#include "levy/quadrature.hpp"
#include "levy/transforms.hpp"

namespace levy {

struct PricingOptions {
    double eps = 1e-10;
    double mesh_safety = 1.0;
};

/// e^{-rT} E^x[G(X_T)] by sinh-accelerated Fourier inversion; the contour
/// wings follow the sign of x' = x + mu T - a, term by term.
double price_european(const CharExponent& model, double r, double T, double x,
                      const PayoffTransform& transform, const PricingOptions& opt = {});

/// e^{-2rT} E^x[(G_j G_l)(X_T)]: same inversion, double discount.
double price_product_european(const CharExponent& model, double r, double T, double x,
                              const PayoffTransform& product_transform,
                              const PricingOptions& opt = {});

struct SobolevSpec {
    double s = 0.5;    // Sobolev order, >= 1/2
    double omega = 0;  // weight exponent of e^{omega x}
};

struct SobolevGram {
    Eigen::MatrixXd gram;        // (G_j, G_k)_{s,omega}
    Eigen::VectorXd target_col;  // (G_0, G_j)_{s,omega}
    double target_norm2 = 0;     // (G_0, G_0)_{s,omega}
};

SobolevGram sobolev_gram(const SobolevSpec& spec, const PayoffTransform& target,
                         const std::vector<PayoffTransform>& instruments,
                         const PricingOptions& opt = {});

/// minimizer of || -G_0 + sum n_j G_j ||^2 in the H^{s,omega} norm;
/// when fixed_first is set, n_1 is pinned and the rest minimize the remainder
std::vector<double> static_weights(const SobolevGram& g, std::optional<double> fixed_first);

struct VmEuropeanResult {
    std::vector<double> weights;
    double n_std = 0;  // sqrt(residual variance) / target price
    double residual_variance = 0;
    double target_price = 0;
};

/// variance-minimizing weights from the discounted first and second moments of
/// the payoffs at maturity (built from price_european / price_product_european)
VmEuropeanResult vm_weights_european(const CharExponent& model, double r, double T, double x,
                                     const PiecewiseExpPayoff& target,
                                     const std::vector<PiecewiseExpPayoff>& instruments,
                                     std::optional<double> fixed_first,
                                     const PricingOptions& opt = {});

/// variance of a given portfolio under the same second-moment functional
double european_portfolio_variance(const CharExponent& model, double r, double T, double x,
                                   const PiecewiseExpPayoff& target,
                                   const std::vector<PiecewiseExpPayoff>& instruments,
                                   const std::vector<double>& weights,
                                   const PricingOptions& opt = {});

}  // namespace levy
