#include "levy/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace levy {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double PiecewiseExpPayoff::operator()(double x) const {
    for (const auto& p : pieces) {
        if (x > p.xlo && x < p.xhi) {
            double v = 0;
            for (auto [c, g] : p.terms) v += c * std::exp(g * x);
            return v;
        }
    }
    return 0.0;
}

PiecewiseExpPayoff PiecewiseExpPayoff::truncated_below(double h) const {
    PiecewiseExpPayoff out;
    for (const auto& p : pieces) {
        if (p.xhi <= h) continue;
        ExpPiece q = p;
        q.xlo = std::max(p.xlo, h);
        out.pieces.push_back(q);
    }
    return out;
}

PiecewiseExpPayoff PiecewiseExpPayoff::vanilla(const Vanilla& v) {
    if (!(v.strike > 0)) throw DomainError("vanilla payoff: strike must be positive");
    const double k = std::log(v.strike);
    PiecewiseExpPayoff p;
    if (v.kind == OptionKind::Call)
        p.pieces.push_back({k, kInf, {{1.0, 1.0}, {-v.strike, 0.0}}});
    else
        p.pieces.push_back({-kInf, k, {{v.strike, 0.0}, {-1.0, 1.0}}});
    return p;
}

PiecewiseExpPayoff PiecewiseExpPayoff::digital_above(double h) {
    PiecewiseExpPayoff p;
    p.pieces.push_back({h, kInf, {{1.0, 0.0}}});
    return p;
}

PiecewiseExpPayoff PiecewiseExpPayoff::exotic_semistatic(double H, double K0, double beta) {
    if (!(K0 > H)) throw DomainError("exotic payoff requires K0 > H");
    const double K1 = H * H / K0;
    const double k1 = std::log(K1);
    const double pref = std::pow(H, -beta) * K0;
    PiecewiseExpPayoff p;
    p.pieces.push_back({-kInf, k1, {{pref * K1, beta - 1.0}, {-pref, beta}}});
    return p;
}

PiecewiseExpPayoff PiecewiseExpPayoff::product(const PiecewiseExpPayoff& a,
                                               const PiecewiseExpPayoff& b) {
    PiecewiseExpPayoff out;
    for (const auto& pa : a.pieces)
        for (const auto& pb : b.pieces) {
            const double lo = std::max(pa.xlo, pb.xlo);
            const double hi = std::min(pa.xhi, pb.xhi);
            if (!(lo < hi)) continue;
            ExpPiece q{lo, hi, {}};
            for (auto [ca, ga] : pa.terms)
                for (auto [cb, gb] : pb.terms) q.terms.push_back({ca * cb, ga + gb});
            out.pieces.push_back(q);
        }
    std::sort(out.pieces.begin(), out.pieces.end(),
              [](const ExpPiece& l, const ExpPiece& r) { return l.xlo < r.xlo; });
    return out;
}

cplx TransformTerm::eval_rational(cplx xi) const {
    cplx v = 0;
    for (const auto& p : poles) v += p.residue / (xi - p.location);
    return v;
}

cplx PayoffTransform::eval(cplx xi) const {
    cplx v = 0;
    for (const auto& t : terms) v += std::exp(-iu * t.a * xi) * t.eval_rational(xi);
    return v;
}

PayoffTransform PayoffTransform::scaled(double factor) const {
    PayoffTransform out = *this;
    for (auto& t : out.terms)
        for (auto& p : t.poles) p.residue *= factor;
    return out;
}

PayoffTransform PayoffTransform::from_payoff(const PiecewiseExpPayoff& payoff) {
    // int_lo^hi e^{-i x xi} c e^{g x} dx = c [ e^{g E} e^{-i E xi} * i/(xi + i g) ]_{lo}^{hi};
    // infinite endpoints contribute nothing but restrict the validity strip.
    PayoffTransform out;
    struct Acc {
        double a;
        std::vector<TransformPole> poles;
    };
    std::vector<Acc> accs;
    auto add = [&](double endpoint, double sign, double coef, double growth) {
        const cplx pole_loc = -iu * growth;
        const cplx res = sign * coef * std::exp(growth * endpoint) * iu;
        for (auto& acc : accs) {
            if (acc.a == endpoint) {
                for (auto& p : acc.poles) {
                    if (std::abs(p.location - pole_loc) < 1e-14) {
                        p.residue += res;
                        return;
                    }
                }
                acc.poles.push_back({pole_loc, res});
                return;
            }
        }
        accs.push_back({endpoint, {{pole_loc, res}}});
    };
    for (const auto& piece : payoff.pieces) {
        for (auto [c, g] : piece.terms) {
            if (std::isfinite(piece.xhi))
                add(piece.xhi, +1.0, c, g);
            else
                out.upper_valid = std::min(out.upper_valid, -g);
            if (std::isfinite(piece.xlo))
                add(piece.xlo, -1.0, c, g);
            else
                out.lower_valid = std::max(out.lower_valid, -g);
        }
    }
    for (auto& acc : accs) {
        TransformTerm t;
        t.a = acc.a;
        for (auto& p : acc.poles)
            if (std::abs(p.residue) > 0) t.poles.push_back(p);
        if (!t.poles.empty()) out.terms.push_back(t);
    }
    std::sort(out.terms.begin(), out.terms.end(),
              [](const TransformTerm& l, const TransformTerm& r) { return l.a < r.a; });
    out.empty_support = out.terms.empty();
    return out;
}

PayoffTransform vanilla_transform(OptionKind kind, double K) {
    return PayoffTransform::from_payoff(PiecewiseExpPayoff::vanilla({kind, K}));
}

PayoffTransform product_transform(const Vanilla& a, const Vanilla& b) {
    const auto payoff =
        PiecewiseExpPayoff::product(PiecewiseExpPayoff::vanilla(a), PiecewiseExpPayoff::vanilla(b));
    return PayoffTransform::from_payoff(payoff);
}

PayoffTransform exotic_semistatic_transform(double H, double K0, double beta, int power,
                                            std::optional<double> cross_strike) {
    auto base = PiecewiseExpPayoff::exotic_semistatic(H, K0, beta);
    if (cross_strike) {
        const auto put = PiecewiseExpPayoff::vanilla({OptionKind::Put, *cross_strike});
        return PayoffTransform::from_payoff(PiecewiseExpPayoff::product(base, put));
    }
    if (power == 1) return PayoffTransform::from_payoff(base);
    if (power == 2)
        return PayoffTransform::from_payoff(PiecewiseExpPayoff::product(base, base));
    throw DomainError("exotic_semistatic_transform: power must be 1 or 2");
}

ReplicationMeasure replication_measure_powered_call(double beta, double K0) {
    if (!(beta > 1)) throw DomainError("powered call needs beta > 1");
    ReplicationMeasure m;
    m.side = ReplicationMeasure::Side::Calls;
    m.support_lo = K0;
    m.support_hi = kInf;
    m.density = [beta, K0](double K) {
        return K > K0 ? beta * (beta - 1.0) * std::pow(K - K0, beta - 2.0) : 0.0;
    };
    return m;
}

ReplicationMeasure replication_measure_power_call(double beta, double K0) {
    if (!(beta > 0)) throw DomainError("power call needs beta > 0");
    ReplicationMeasure m;
    m.side = ReplicationMeasure::Side::Calls;
    const double kink = std::pow(K0, 1.0 / beta);
    m.atoms.push_back({kink, beta * std::pow(kink, beta - 1.0)});
    m.support_lo = kink;
    m.support_hi = kInf;
    m.density = [beta, kink](double K) {
        return K > kink ? beta * (beta - 1.0) * std::pow(K, beta - 2.0) : 0.0;
    };
    return m;
}

ReplicationMeasure replication_measure_exotic(double H, double K0, double beta) {
    if (!(K0 > H)) throw DomainError("exotic measure requires K0 > H");
    ReplicationMeasure m;
    m.side = ReplicationMeasure::Side::Puts;
    const double K1 = H * H / K0;
    const double pref = std::pow(H, -beta) * K0;
    m.atoms.push_back({K1, pref * std::pow(K1, beta - 1.0)});
    m.support_lo = 0.0;
    m.support_hi = K1;
    m.density = [pref, beta, K1](double K) {
        if (!(K > 0 && K < K1)) return 0.0;
        return pref * (beta - 1.0) * std::pow(K, beta - 2.0) * ((beta - 2.0) * K1 / K - beta);
    };
    return m;
}

}  // namespace levy
