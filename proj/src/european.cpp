#include "levy/european.hpp"

#include <algorithm>
#include <cmath>

namespace levy {

namespace {

void clamp_strip(double& lo, double& hi) {
    if (!std::isfinite(lo) && !std::isfinite(hi)) {
        lo = -6.0;
        hi = 6.0;
    } else if (!std::isfinite(lo)) {
        lo = hi - 10.0;
    } else if (!std::isfinite(hi)) {
        hi = lo + 10.0;
    }
}

struct PricingContour {
    SinhContour contour;
    TrapezoidGrid grid;
};

// Contour for one pricing term: apex at mid-strip, wings following sign(x').
// Truncation from whichever decay channel (payoff oscillation, heat kernel)
// cuts off sooner.
PricingContour pricing_contour(const CharExponent& model, double T, double xprime, double lo,
                               double hi, double poly_decay, const PricingOptions& opt) {
    if (!(lo < hi)) throw DomainError("price_european: empty admissible omega interval");
    clamp_strip(lo, hi);
    const double nu = model.order();
    const double cone = 0.5 * pi / nu;
    const double aw = 0.7 * std::min(0.5 * pi, cone);

    SinhContour c;
    c.omega = (xprime >= 0) ? aw : -aw;
    c.b = 0.5 * (hi - lo);
    c.omega1 = 0.5 * (lo + hi) - c.b * std::sin(c.omega);

    const double v_geo = std::min(aw, 0.5 * pi - aw);
    const double v_cone = std::max(0.05, cone - aw);
    double v_apex = v_geo;
    for (int it = 0; it < 60; ++it) {
        const double a1 = c.omega1 + c.b * std::sin(c.omega + v_apex);
        const double a2 = c.omega1 + c.b * std::sin(c.omega - v_apex);
        const double top = std::max(a1, a2), bot = std::min(a1, a2);
        if (top < hi - 0.02 * (hi - lo) && bot > lo + 0.02 * (hi - lo)) break;
        v_apex *= 0.85;
    }
    DecayModel dm;
    dm.strip_half_width = 0.75 * std::min({v_geo, v_cone, v_apex});
    dm.b = c.b;
    dm.poly_decay = std::max(0.0, poly_decay);

    TrapezoidGrid g1{1.0, 1 << 26};
    const double osc = std::abs(xprime) * std::sin(aw);
    if (osc > 0) {
        DecayModel d1 = dm;
        d1.kappa_exp = osc;
        d1.nu_exp = 1.0;
        g1 = select_grid(d1, opt.eps, opt.mesh_safety);
    }
    DecayModel d2 = dm;
    d2.kappa_exp = T * model.c0inf() * std::max(0.05, std::cos(nu * aw));
    d2.nu_exp = nu;
    const TrapezoidGrid g2 = select_grid(d2, opt.eps, opt.mesh_safety);

    PricingContour out;
    out.contour = c;
    out.grid = (g1.N <= g2.N) ? g1 : g2;
    return out;
}

double term_poly_decay(const TransformTerm& term) {
    cplx sum = 0;
    double mag = 0;
    for (const auto& p : term.poles) {
        sum += p.residue;
        mag += std::abs(p.residue);
    }
    // net decay along the contour including the chi' growth
    const double rational = (std::abs(sum) < 1e-12 * mag) ? 2.0 : 1.0;
    return rational - 1.0;
}

double price_with_discount(const CharExponent& model, double discount_rate, double T, double x,
                           const PayoffTransform& transform, const PricingOptions& opt) {
    if (!(T > 0)) throw DomainError("price_european: T must be positive");
    if (transform.empty_support || transform.terms.empty()) return 0.0;
    const double lo = std::max(transform.lower_valid, model.lambda_minus());
    const double hi = std::min(transform.upper_valid, model.lambda_plus());
    cplx total = 0;
    for (const auto& term : transform.terms) {
        const double xprime = x + model.mu() * T - term.a;
        const auto pc = pricing_contour(model, T, xprime, lo, hi, term_poly_decay(term), opt);
        auto integrand = [&](cplx xi) {
            return std::exp(iu * xprime * xi - T * model.psi0(xi)) * term.eval_rational(xi);
        };
        // the asymptotic decay model can be optimistic at moderate |xi| (the
        // tempering weakens Re psi0); extend the window until the end samples
        // are genuinely below tolerance
        TrapezoidGrid grid = pc.grid;
        auto end_mag = [&](int n) {
            const double y = n * grid.zeta;
            const double a = std::abs(integrand(pc.contour.point(y)) * pc.contour.deriv(y));
            const double b = std::abs(integrand(pc.contour.point(-y)) * pc.contour.deriv(-y));
            return grid.zeta * std::max(a, b);
        };
        const int n0 = grid.N;
        while (end_mag(grid.N) > 0.2 * opt.eps && grid.N < 64 * n0)
            grid.N += std::max(8, grid.N / 4);
        total += trapezoid_sum(grid, pc.contour, integrand);
    }
    const double value = (total / (2.0 * pi)).real();
    return std::exp(-discount_rate * T) * value;
}

}  // namespace

double price_european(const CharExponent& model, double r, double T, double x,
                      const PayoffTransform& transform, const PricingOptions& opt) {
    return price_with_discount(model, r, T, x, transform, opt);
}

double price_product_european(const CharExponent& model, double r, double T, double x,
                              const PayoffTransform& product_transform,
                              const PricingOptions& opt) {
    return price_with_discount(model, 2.0 * r, T, x, product_transform, opt);
}

namespace {

cplx gram_pair_integral(const SobolevSpec& spec, const PayoffTransform& gj,
                        const PayoffTransform& gk, const PricingOptions& opt) {
    const double omega = spec.omega;
    cplx total = 0;
    for (const auto& tj : gj.terms) {
        for (const auto& tk : gk.terms) {
            const double delta = tj.a - tk.a;
            // nearest singularity to the real t-axis: the branch points of
            // (1+t^2)^s at +-i and the poles of both factors
            double sing = 1.0;
            for (const auto& p : tj.poles)
                sing = std::min(sing, std::abs(p.location.imag() - omega));
            for (const auto& p : tk.poles)
                sing = std::min(sing, std::abs(p.location.imag() - omega));
            if (sing < 1e-9)
                throw DomainError("sobolev_gram: omega hits a pole of a transform");
            SinhContour c;
            c.b = 1.0;
            c.omega1 = 0.0;
            c.omega = (delta == 0.0) ? 0.0 : (delta > 0 ? -0.6 : 0.6);
            const double aw = std::abs(c.omega);
            double v_max = std::asin(std::min(1.0, 0.9 * sing / c.b)) - aw;
            v_max = std::min(v_max, 0.5 * pi - aw);
            if (!(v_max > 0.02)) v_max = 0.02;
            DecayModel dm;
            dm.strip_half_width = 0.75 * v_max;
            dm.b = c.b;
            dm.poly_decay = 3.0 - 2.0 * spec.s;
            if (delta != 0.0) {
                dm.kappa_exp = std::abs(delta) * std::sin(aw);
                dm.nu_exp = 1.0;
            }
            const TrapezoidGrid grid = select_grid(dm, opt.eps, opt.mesh_safety);
            auto integrand = [&](cplx tt) {
                const cplx w = std::pow(1.0 + tt * tt, spec.s);
                cplx vj = 0;
                for (const auto& p : tj.poles) vj += p.residue / (tt + iu * omega - p.location);
                vj *= std::exp(-iu * tj.a * (tt + iu * omega));
                cplx vk = 0;
                for (const auto& p : tk.poles)
                    vk += std::conj(p.residue) / (tt - iu * omega - std::conj(p.location));
                vk *= std::exp(iu * tk.a * (tt - iu * omega));
                return w * vj * vk;
            };
            total += trapezoid_sum(grid, c, integrand);
        }
    }
    return total;
}

}  // namespace

SobolevGram sobolev_gram(const SobolevSpec& spec, const PayoffTransform& target,
                         const std::vector<PayoffTransform>& instruments,
                         const PricingOptions& opt) {
    if (spec.s < 0.5) throw DomainError("sobolev_gram: s must be >= 1/2");
    const int n = static_cast<int>(instruments.size());
    SobolevGram out;
    out.gram.resize(n, n);
    out.target_col.resize(n);
    for (int j = 0; j < n; ++j) {
        for (int k = j; k < n; ++k) {
            const cplx v = gram_pair_integral(spec, instruments[j], instruments[k], opt);
            if (std::abs(v.imag()) > 1e-9 * (1.0 + std::abs(v.real())))
                throw NumericError("sobolev_gram: entry has a spurious imaginary part");
            out.gram(j, k) = v.real();
            out.gram(k, j) = v.real();
        }
        out.target_col(j) = gram_pair_integral(spec, target, instruments[j], opt).real();
    }
    out.target_norm2 = gram_pair_integral(spec, target, target, opt).real();
    return out;
}

std::vector<double> static_weights(const SobolevGram& g, std::optional<double> fixed_first) {
    const int n = static_cast<int>(g.target_col.size());
    Eigen::LDLT<Eigen::MatrixXd> full(g.gram);
    if (full.info() != Eigen::Success || !full.isPositive()) {
        int bj = 0, bk = 1;
        double worst = 0;
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                const double c = std::abs(g.gram(j, k)) / std::sqrt(g.gram(j, j) * g.gram(k, k));
                if (c > worst) worst = c, bj = j, bk = k;
            }
        throw NumericError("static_weights: Gram matrix is not positive definite (instruments " +
                           std::to_string(bj + 1) + " and " + std::to_string(bk + 1) +
                           " nearly collinear)");
    }
    std::vector<double> w(n);
    if (!fixed_first) {
        Eigen::VectorXd sol = full.solve(g.target_col);
        for (int j = 0; j < n; ++j) w[j] = sol(j);
        return w;
    }
    w[0] = *fixed_first;
    if (n == 1) return w;
    Eigen::MatrixXd a = g.gram.block(1, 1, n - 1, n - 1);
    Eigen::VectorXd b = g.target_col.segment(1, n - 1) - w[0] * g.gram.block(1, 0, n - 1, 1);
    Eigen::VectorXd sol = Eigen::LDLT<Eigen::MatrixXd>(a).solve(b);
    for (int j = 1; j < n; ++j) w[j] = sol(j - 1);
    return w;
}

namespace {

struct EuropeanMoments {
    Eigen::VectorXd price;   // V_j, j = 0..n (0 = target)
    Eigen::MatrixXd second;  // V_{jl}
};

EuropeanMoments european_moments(const CharExponent& model, double r, double T, double x,
                                 const PiecewiseExpPayoff& target,
                                 const std::vector<PiecewiseExpPayoff>& instruments,
                                 const PricingOptions& opt) {
    const int n = static_cast<int>(instruments.size());
    std::vector<const PiecewiseExpPayoff*> all(n + 1);
    all[0] = &target;
    for (int j = 0; j < n; ++j) all[j + 1] = &instruments[j];
    EuropeanMoments m;
    m.price.resize(n + 1);
    m.second.resize(n + 1, n + 1);
    for (int j = 0; j <= n; ++j)
        m.price(j) =
            price_european(model, r, T, x, PayoffTransform::from_payoff(*all[j]), opt);
    for (int j = 0; j <= n; ++j)
        for (int k = j; k <= n; ++k) {
            const auto prod = PiecewiseExpPayoff::product(*all[j], *all[k]);
            const double v =
                price_product_european(model, r, T, x, PayoffTransform::from_payoff(prod), opt);
            m.second(j, k) = v;
            m.second(k, j) = v;
        }
    return m;
}

}  // namespace

VmEuropeanResult vm_weights_european(const CharExponent& model, double r, double T, double x,
                                     const PiecewiseExpPayoff& target,
                                     const std::vector<PiecewiseExpPayoff>& instruments,
                                     std::optional<double> fixed_first,
                                     const PricingOptions& opt) {
    const int n = static_cast<int>(instruments.size());
    const auto m = european_moments(model, r, T, x, target, instruments, opt);
    Eigen::MatrixXd A(n, n);
    Eigen::VectorXd b(n);
    for (int j = 0; j < n; ++j) {
        b(j) = m.second(0, j + 1) - m.price(0) * m.price(j + 1);
        for (int k = 0; k < n; ++k)
            A(j, k) = m.second(j + 1, k + 1) - m.price(j + 1) * m.price(k + 1);
    }
    const double var0 = m.second(0, 0) - m.price(0) * m.price(0);

    VmEuropeanResult res;
    res.weights.resize(n);
    Eigen::VectorXd w(n);
    if (!fixed_first) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
        if (ldlt.info() != Eigen::Success)
            throw NumericError("vm_weights_european: covariance matrix is not SPD");
        w = ldlt.solve(b);
    } else {
        w(0) = *fixed_first;
        if (n > 1) {
            Eigen::MatrixXd Af = A.block(1, 1, n - 1, n - 1);
            Eigen::VectorXd bf = b.segment(1, n - 1) - w(0) * A.block(1, 0, n - 1, 1);
            w.segment(1, n - 1) = Eigen::LDLT<Eigen::MatrixXd>(Af).solve(bf);
        }
    }
    for (int j = 0; j < n; ++j) res.weights[j] = w(j);
    res.residual_variance = var0 - 2.0 * w.dot(b) + w.dot(A * w);
    res.target_price = m.price(0);
    res.n_std = std::sqrt(std::max(0.0, res.residual_variance)) / res.target_price;
    return res;
}

double european_portfolio_variance(const CharExponent& model, double r, double T, double x,
                                   const PiecewiseExpPayoff& target,
                                   const std::vector<PiecewiseExpPayoff>& instruments,
                                   const std::vector<double>& weights,
                                   const PricingOptions& opt) {
    const int n = static_cast<int>(instruments.size());
    const auto m = european_moments(model, r, T, x, target, instruments, opt);
    double var = m.second(0, 0) - m.price(0) * m.price(0);
    for (int j = 0; j < n; ++j) {
        var -= 2.0 * weights[j] * (m.second(0, j + 1) - m.price(0) * m.price(j + 1));
        for (int k = 0; k < n; ++k)
            var += weights[j] * weights[k] *
                   (m.second(j + 1, k + 1) - m.price(j + 1) * m.price(k + 1));
    }
    return var;
}

}  // namespace levy
