#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "levy/common.hpp"

namespace levy {

enum class OptionKind { Call, Put };

struct Vanilla {
    OptionKind kind;
    double strike;
};

/// Payoff written as a sum of exponentials on finitely many intervals,
/// sum_m coef_m e^{growth_m x} on (xlo, xhi).  Closed under products, which is
/// how all the product transforms are generated.
struct ExpPiece {
    double xlo, xhi;  // may be +-infinity
    std::vector<std::pair<double, double>> terms;  // (coef, growth)
};

struct PiecewiseExpPayoff {
    std::vector<ExpPiece> pieces;  // disjoint, sorted by xlo

    double operator()(double x) const;
    PiecewiseExpPayoff truncated_below(double h) const;  // keep x > h only
    static PiecewiseExpPayoff vanilla(const Vanilla& v);
    static PiecewiseExpPayoff product(const PiecewiseExpPayoff& a, const PiecewiseExpPayoff& b);
    static PiecewiseExpPayoff digital_above(double h);   // 1_{(h, inf)}
    /// exotic semi-static payoff (S/H)^beta (H^2/S - K0)_+ 1_{S <= H}, K0 > H
    static PiecewiseExpPayoff exotic_semistatic(double H, double K0, double beta);
};

struct TransformPole {
    cplx location;
    cplx residue;
};

/// One shifted rational term e^{-i a xi} sum_p res_p / (xi - p).
struct TransformTerm {
    double a = 0;
    std::vector<TransformPole> poles;
    cplx eval_rational(cplx xi) const;  // the rational factor only
};

/// Fourier transform G^(xi) = int e^{-i x xi} G(x) dx in the normal form
/// sum_t e^{-i a_t xi} G0_t(xi) with rational G0_t, valid on the strip
/// lower_valid < Im xi < upper_valid.
struct PayoffTransform {
    std::vector<TransformTerm> terms;
    double lower_valid = -std::numeric_limits<double>::infinity();
    double upper_valid = std::numeric_limits<double>::infinity();
    bool empty_support = false;

    cplx eval(cplx xi) const;
    PayoffTransform scaled(double factor) const;

    static PayoffTransform from_payoff(const PiecewiseExpPayoff& payoff);
};

PayoffTransform vanilla_transform(OptionKind kind, double K);
PayoffTransform product_transform(const Vanilla& a, const Vanilla& b);

/// Transforms of the semi-static exotic payoff and its square / cross terms
/// with puts: power = 1 is the payoff itself, power = 2 its square, and
/// cross_strike (if set) the product with a put of that strike.
PayoffTransform exotic_semistatic_transform(double H, double K0, double beta, int power,
                                            std::optional<double> cross_strike = std::nullopt);

/// Static replication measure d G'(K): atoms at kinks plus a density, with the
/// representation side (puts or calls).
struct ReplicationMeasure {
    enum class Side { Puts, Calls };
    Side side;
    std::vector<std::pair<double, double>> atoms;  // (strike, mass)
    std::function<double(double)> density;         // w.r.t. dK
    double support_lo, support_hi;                 // density support
};

ReplicationMeasure replication_measure_powered_call(double beta, double K0);
ReplicationMeasure replication_measure_power_call(double beta, double K0);
ReplicationMeasure replication_measure_exotic(double H, double K0, double beta);

}  // namespace levy
