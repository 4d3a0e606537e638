#include "levy/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

namespace levy {

namespace {

constexpr double kDxFloor = 2e-4;  // smallest log-distance the cached curves support
constexpr double kWing = 0.85;     // wing angle of the inversion contours

struct ImPole {
    cplx location;
    cplx value;
};

// merged residues of eta -> e^{i h eta} G^(eta)
std::vector<ImPole> merged_poles(const PayoffTransform& g, double h) {
    std::vector<ImPole> out;
    for (const auto& t : g.terms) {
        for (const auto& p : t.poles) {
            const cplx w = std::exp(-iu * (t.a - h) * p.location) * p.residue;
            bool found = false;
            for (auto& o : out)
                if (std::abs(o.location - p.location) < 1e-12) {
                    o.value += w;
                    found = true;
                    break;
                }
            if (!found) out.push_back({p.location, w});
        }
    }
    double scale = 0;
    for (const auto& o : out) scale = std::max(scale, std::abs(o.value));
    std::erase_if(out, [scale](const ImPole& p) { return std::abs(p.value) < 1e-13 * scale; });
    return out;
}

}  // namespace

struct LaplacePricer::QData {
    WhFactorField field;
    SinhContour up_c;  // wings up (L^+ or L^{++}), weights include phi^-
    TrapezoidGrid up_g;
    bool crossed = false;
    cplx res_phim = 0;
    std::vector<cplx> up_xi, up_w;
    SinhContour dn_c;  // wings down, weights include phi^+
    TrapezoidGrid dn_g;
    std::vector<cplx> dn_eta, dn_w;

    QData(const CharExponent& model, double q, const BarrierOptions& opt)
        : field(model, q, WhOptions{std::max(1e-14, opt.eps * 1e-2), 0.25 * pi, 0.55, 0.75}) {
        const double sp = field.sigma_plus();
        const double lp = model.lambda_plus();
        // pole-crossing policy: cross -i beta^-_q only when the root keeps a
        // comfortable distance to the upper cut
        double apex;
        if (field.beta_minus() && std::isfinite(lp) && (lp - sp) > opt.cross_threshold * lp) {
            crossed = true;
            apex = sp + 0.5 * (lp - sp);
        } else if (field.beta_minus() && !std::isfinite(lp)) {
            crossed = true;
            apex = 1.5 * sp;
        } else {
            crossed = false;
            apex = 0.45 * std::min(sp, std::isfinite(lp) ? lp : sp);
        }
        if (crossed) res_phim = field.phi_minus_residue_upper();

        up_c.omega = kWing;
        up_c.b = apex / std::sin(kWing);
        up_c.omega1 = 0.0;
        {
            double v_apex = std::min(kWing, 0.5 * pi - kWing);
            for (int it = 0; it < 50; ++it) {
                const double lo_ap = up_c.b * std::sin(kWing - v_apex);
                const double hi_ap = up_c.b * std::sin(std::min(0.5 * pi, kWing + v_apex));
                const bool lo_ok =
                    crossed ? (lo_ap > sp + 0.05 * (apex - sp)) : (lo_ap > 0.03 * apex);
                const bool hi_ok = std::isfinite(lp) ? (hi_ap < 0.97 * lp) : true;
                const bool hi_ok2 = crossed || (hi_ap < 0.97 * sp);
                if (lo_ok && hi_ok && hi_ok2) break;
                v_apex *= 0.85;
            }
            DecayModel dm;
            dm.strip_half_width = 0.75 * std::min(std::min(kWing, 0.5 * pi - kWing), v_apex);
            dm.b = up_c.b;
            dm.poly_decay = 1.0;
            dm.kappa_exp = kDxFloor * std::sin(kWing);
            dm.nu_exp = 1.0;
            up_g = select_grid(dm, opt.eps, opt.mesh_safety);
        }
        up_xi.resize(up_g.node_count());
        up_w.resize(up_g.node_count());
        for (int k = -up_g.N; k <= up_g.N; ++k) {
            const double y = k * up_g.zeta;
            const cplx xi = up_c.point(y);
            up_xi[k + up_g.N] = xi;
            up_w[k + up_g.N] = up_g.zeta * up_c.deriv(y) / (2.0 * pi) * field.phi_minus(xi);
        }

        const double sm = field.sigma_minus();
        const double lm = model.lambda_minus();
        const double lo_d = 0.97 * std::max(sm, std::isfinite(lm) ? lm : sm);
        double apex_d = std::min(-0.5, 0.55 * lo_d);
        if (apex_d <= lo_d) apex_d = 0.5 * lo_d;
        dn_c.omega = -kWing;
        dn_c.b = -apex_d / std::sin(kWing);
        dn_c.omega1 = 0.0;
        {
            double v_apex = std::min(kWing, 0.5 * pi - kWing);
            for (int it = 0; it < 50; ++it) {
                const double a1 = -dn_c.b * std::sin(std::min(0.5 * pi, kWing + v_apex));
                const double a2 = -dn_c.b * std::sin(std::max(0.0, kWing - v_apex));
                if (std::min(a1, a2) > lo_d && std::max(a1, a2) < -0.02 * std::abs(apex_d)) break;
                v_apex *= 0.85;
            }
            DecayModel dm;
            dm.strip_half_width = 0.75 * std::min(std::min(kWing, 0.5 * pi - kWing), v_apex);
            dm.b = dn_c.b;
            dm.poly_decay = 1.0;
            dn_g = select_grid(dm, opt.eps, opt.mesh_safety);
        }
        dn_eta.resize(dn_g.node_count());
        dn_w.resize(dn_g.node_count());
        for (int k = -dn_g.N; k <= dn_g.N; ++k) {
            const double y = k * dn_g.zeta;
            const cplx eta = dn_c.point(y);
            dn_eta[k + dn_g.N] = eta;
            dn_w[k + dn_g.N] = dn_g.zeta * dn_c.deriv(y) / (2.0 * pi) * field.phi_plus(eta);
        }
    }

    // (2 pi)^{-1} int_{L+} e^{i dx xi} phi^-(xi) Y(xi) dxi (+ crossing residue)
    cplx outer(double dx, const std::function<cplx(cplx)>& y) const {
        const int N = up_g.N;
        auto term = [&](int j) { return up_w[j] * std::exp(iu * dx * up_xi[j]) * y(up_xi[j]); };
        cplx acc = term(N);
        for (int k = 1; k <= N; ++k) acc += term(N + k) + term(N - k);
        if (crossed) {
            const cplx root(0.0, field.sigma_plus());
            acc += iu * std::exp(-field.sigma_plus() * dx) * res_phim * y(root);
        }
        return acc;
    }

    cplx j_beta(double dx, double beta) const {
        return outer(dx, [&](cplx xi) { return 1.0 / (beta - iu * xi); });
    }
};

LaplacePricer::LaplacePricer(const CharExponent& model, double r, double h,
                             const BarrierOptions& opt)
    : model_(model), r_(r), h_(h), opt_(opt) {}

LaplacePricer::~LaplacePricer() = default;

LaplacePricer::QData& LaplacePricer::qdata(double q) const {
    auto it = cache_.find(q);
    if (it == cache_.end())
        it = cache_.emplace(q, std::make_unique<QData>(model_, q, opt_)).first;
    return *it->second;
}

const WhFactorField& LaplacePricer::field(double q) const { return qdata(q).field; }

double LaplacePricer::survival_transform(double q, double x) const {
    if (!(x > h_)) throw DomainError("barrier: spot must be above the barrier");
    return qdata(q).j_beta(x - h_, 0.0).real();
}

cplx LaplacePricer::ft_power_laplace(double q, double x, double beta, double discount) const {
    if (!(x > h_)) throw DomainError("barrier: spot must be above the barrier");
    if (!(beta >= 0 && beta < -model_.lambda_minus()))
        throw DomainError("ft_power: beta must lie in [0, -lambda_-)");
    if (!(q - discount > 0))
        throw DomainError("ft_power: q - discount <= 0 on the Laplace grid (increase T or M)");
    auto& qd = qdata(q);
    const cplx j = qd.j_beta(x - h_, beta);
    const cplx phim = qd.field.phi_minus(cplx(0.0, -beta));
    return std::exp(beta * h_) * j / (phim * (q - discount));
}

namespace {

// (2 pi)^{-1} int e^{i shift xi} K(xi) dxi over a sinh contour with the given
// apex; wings follow the sign requested
cplx one_d_integral(double shift, double apex, bool wings_up, double poly,
                    const std::function<cplx(cplx)>& kernel, double eps, double mesh_safety) {
    SinhContour c;
    c.omega = wings_up ? kWing : -kWing;
    c.b = std::abs(apex) / std::sin(kWing);
    c.omega1 = apex - c.b * std::sin(c.omega);
    DecayModel dm;
    dm.strip_half_width = 0.55 * std::min(kWing, 0.5 * pi - kWing);
    dm.b = c.b;
    dm.poly_decay = poly;
    dm.kappa_exp = std::max(std::abs(shift), kDxFloor) * std::sin(kWing);
    dm.nu_exp = 1.0;
    const TrapezoidGrid g = select_grid(dm, eps, mesh_safety);
    auto f = [&](cplx xi) { return std::exp(iu * shift * xi) * kernel(xi); };
    return trapezoid_sum(g, c, f) / (2.0 * pi);
}

}  // namespace

cplx LaplacePricer::notouch_laplace(double q, double x, const PayoffTransform& g) const {
    if (!(x > h_)) throw DomainError("barrier: spot must be above the barrier");
    if (g.empty_support || g.terms.empty()) return 0.0;
    auto& qd = qdata(q);
    const auto& field = qd.field;
    const double sp = field.sigma_plus();
    const double dx = x - h_;

    // classification line for pole crossings (a valid Pi^+ starting line)
    const double start = std::isfinite(g.upper_valid)
                             ? std::min(g.upper_valid - 1e-6 * (1.0 + std::abs(g.upper_valid)),
                                        0.4 * sp)
                             : 0.4 * sp;
    const double floor_im = std::max({field.sigma_minus(), model_.lambda_minus(), g.lower_valid});
    if (!(start > floor_im))
        throw DomainError("notouch_laplace: empty analyticity strip for this payoff");

    // inner Pi^+ integral on the cached down contour, with merged-residue
    // corrections for transform poles crossed on the way down
    const auto poles = merged_poles(g, h_);
    std::vector<ImPole> crossed_dn;
    for (const auto& p : poles)
        if (p.location.imag() > qd.dn_c.apex() && p.location.imag() < start)
            crossed_dn.push_back({p.location, p.value * field.phi_plus(p.location)});
    const int Nd = qd.dn_g.N;
    std::vector<cplx> inner_w(qd.dn_eta.size());
    for (size_t j = 0; j < qd.dn_eta.size(); ++j) {
        const cplx eta = qd.dn_eta[j];
        cplx gv = 0;
        for (const auto& t : g.terms)
            gv += std::exp(-iu * (t.a - h_) * eta) * t.eval_rational(eta);
        inner_w[j] = qd.dn_w[j] * gv;
    }
    auto p_inner = [&](cplx xi) {
        auto term = [&](int j) { return inner_w[j] / (iu * (xi - qd.dn_eta[j])); };
        cplx acc = term(Nd);
        for (int k = 1; k <= Nd; ++k) acc += term(Nd + k) + term(Nd - k);
        // downward deformation: the line value is the contour integral minus
        // the residues of the poles that were crossed
        for (const auto& p : crossed_dn) acc -= p.value / (xi - p.location);
        return acc;
    };
    cplx v = qd.outer(dx, p_inner) / q;

    // 1-D psi-integral per term, contour chosen by the sign of x - a
    const double nu = model_.order();
    for (const auto& t : g.terms) {
        const double shift = x - t.a;
        auto kernel = [&](cplx xi) { return t.eval_rational(xi) / (q + model_.psi(xi)); };
        if (shift >= 0) {
            const double apex =
                0.45 * std::min(sp, std::isfinite(model_.lambda_plus()) ? model_.lambda_plus()
                                                                        : sp);
            v += one_d_integral(shift, apex, true, 1.0 + nu, kernel, opt_.eps, opt_.mesh_safety);
            for (const auto& p : t.poles)
                if (p.location.imag() > start && p.location.imag() < apex)
                    v += iu * std::exp(iu * shift * p.location) * p.residue /
                         (q + model_.psi(p.location));
        } else {
            const double apex = qd.dn_c.apex();
            v += one_d_integral(shift, apex, false, 1.0 + nu, kernel, opt_.eps, opt_.mesh_safety);
            for (const auto& p : t.poles)
                if (p.location.imag() > apex && p.location.imag() < start)
                    v -= iu * std::exp(iu * shift * p.location) * p.residue /
                         (q + model_.psi(p.location));
        }
    }
    return v;
}

cplx LaplacePricer::asymptotic_notouch(double q, double x, const PayoffTransform& g) const {
    auto& qd = qdata(q);
    const auto& field = qd.field;
    if (!field.beta_minus() || !field.beta_plus())
        throw DomainError("asymptotic_notouch: both roots must exist");
    if (g.terms.size() != 1) throw DomainError("asymptotic_notouch: single-term transforms only");
    const auto& t = g.terms.front();
    const double a = t.a;
    if (!(x - h_ > 0.02)) throw DomainError("asymptotic_notouch: x too close to the barrier");
    if (!(std::abs(a - x) > 0.02)) throw DomainError("asymptotic_notouch: x too close to a");
    const double sp = field.sigma_plus(), sm = field.sigma_minus();
    const cplx up(0.0, sp), dn(0.0, sm);
    const double beta_m = -sp, beta_p = -sm;
    const cplx g0_dn = t.eval_rational(dn);
    cplx v = -std::exp(beta_m * (x - h_)) / (field.phi_plus_direct(up) * model_.dpsi(up)) *
             std::exp(-beta_p * (a - h_)) * g0_dn /
             (field.phi_minus_direct(dn) * model_.dpsi(dn) * (beta_p - beta_m));
    if (x < a)
        v += -iu * std::exp(beta_p * (x - a)) * g0_dn / model_.dpsi(dn);
    else
        v += iu * std::exp(beta_m * (x - a)) * t.eval_rational(up) / model_.dpsi(up);
    return v / q;
}

cplx LaplacePricer::ft_embedded_laplace(double q, double x, OptionKind kind, double K,
                                        double discount, double theta_discount, double beta_shift,
                                        bool with_vanilla) const {
    if (!(x > h_)) throw DomainError("barrier: spot must be above the barrier");
    auto& qd = qdata(q);
    const auto& field = qd.field;
    const double dx = x - h_;

    if (!with_vanilla) {
        // W(theta, y) = e^{-c theta} e^{beta y}
        const double denom = q - discount + theta_discount;
        if (!(denom > 0)) throw DomainError("ft_embedded: q-shift is not positive");
        const cplx j = qd.j_beta(dx, beta_shift);
        const cplx phim = field.phi_minus(cplx(0.0, -beta_shift));
        return std::exp(beta_shift * h_) * j / (phim * denom);
    }

    const double a = std::log(K);
    const double qs = q - discount + theta_discount + r_;
    if (!(qs > 0)) throw DomainError("ft_embedded: kernel shift q_s is not positive");
    const bool plain = (qs == q) && (beta_shift == 0.0);
    std::optional<double> sp_s, sm_s;  // kernel roots at q_s
    if (plain) {
        if (field.beta_minus()) sp_s = field.sigma_plus();
        if (field.beta_plus()) sm_s = field.sigma_minus();
    } else {
        const WhRoots rs = wh_roots(model_, qs);
        if (rs.beta_minus) sp_s = rs.sigma_plus;
        if (rs.beta_plus) sm_s = rs.sigma_minus;
    }
    const double pref = std::exp(a * beta_shift);
    auto rational = [K](cplx z) { return -K / (z * (z + iu)); };
    auto kernel_ratio = [&](cplx eta) {
        if (plain) return cplx(1.0, 0.0);
        return (q + model_.psi(eta)) / (qs + model_.psi(eta + iu * beta_shift));
    };
    // N(eta) / phi^+(eta), the part the cached weights do not carry
    auto n_over_phip = [&](cplx eta) {
        return pref * rational(eta + iu * beta_shift) * kernel_ratio(eta) / q;
    };

    // pole catalogue of N in the eta plane
    std::vector<ImPole> cat;
    {
        const cplx p0 = -iu * beta_shift;
        const cplx p1 = -iu * (1.0 + beta_shift);
        cat.push_back({p0, iu * K * pref * kernel_ratio(p0) * field.phi_plus(p0) / q});
        cat.push_back({p1, -iu * K * pref * kernel_ratio(p1) * field.phi_plus(p1) / q});
        if (!plain && sp_s) {
            const cplx pk(0.0, *sp_s - beta_shift);
            const cplx zk(0.0, *sp_s);
            cat.push_back({pk, pref * rational(zk) * (q + model_.psi(pk)) *
                                   field.phi_plus(pk) / (q * model_.dpsi(zk))});
        }
    }

    // fundamental analyticity floor for the inner integrand; the transform's
    // own validity bound only fixes the starting line, poles crossed below it
    // are handled by the residue catalogue
    const double floor_im = std::max({model_.lambda_minus(), field.sigma_minus(),
                                      sm_s ? *sm_s - beta_shift : model_.lambda_minus()});
    double strip_lo, strip_hi;
    if (kind == OptionKind::Call) {
        strip_lo = floor_im;
        strip_hi = -1.0 - beta_shift;
    } else {
        strip_lo = std::max(-beta_shift, floor_im);
        strip_hi = std::min({model_.lambda_plus(), field.sigma_plus(),
                             sp_s ? *sp_s - beta_shift : model_.lambda_plus()});
    }
    if (!(strip_lo < strip_hi))
        throw DomainError("ft_embedded: empty analyticity strip (lambda_- too small?)");

    if (a >= h_) {
        const double start = strip_hi - 1e-6 * (1.0 + std::abs(strip_hi));
        const double apex_d = qd.dn_c.apex();
        if (!(apex_d > floor_im)) throw DomainError("ft_embedded: inner contour leaves the strip");
        std::vector<ImPole> crossed;
        for (const auto& p : cat)
            if (p.location.imag() > apex_d && p.location.imag() < start) crossed.push_back(p);
        std::vector<cplx> w(qd.dn_eta.size());
        for (size_t j = 0; j < qd.dn_eta.size(); ++j)
            w[j] = qd.dn_w[j] * n_over_phip(qd.dn_eta[j]) *
                   std::exp(-iu * (a - h_) * qd.dn_eta[j]);
        const int Nd = qd.dn_g.N;
        auto yfun = [&](cplx xi) {
            auto term = [&](int j) { return w[j] / (qd.dn_eta[j] - xi); };
            cplx acc = term(Nd);
            for (int k = 1; k <= Nd; ++k) acc += term(Nd + k) + term(Nd - k);
            acc /= iu;
            // downward deformation subtracts the crossed residues
            for (const auto& p : crossed)
                acc -= std::exp(-iu * (a - h_) * p.location) * p.value / (p.location - xi);
            return acc;
        };
        return qd.outer(dx, yfun);
    }

    // strike below the barrier: the raised inner contour vanishes at infinity;
    // residues plus the reduced 1-D integral survive
    const double start = strip_lo + 1e-6 * (1.0 + std::abs(strip_lo));
    cplx v = 0;
    for (const auto& p : cat) {
        if (!(p.location.imag() > start)) continue;
        const cplx piece = std::exp(-iu * (a - h_) * p.location) * p.value;
        v += qd.outer(dx, [&](cplx xi) { return piece / (p.location - xi); });
    }
    auto w0 = [&](cplx xi) {
        const cplx z = xi + iu * beta_shift;
        return pref * rational(z) / (qs + model_.psi(z));
    };
    const double apex_lim = sp_s ? (*sp_s - beta_shift) : field.sigma_plus();
    const double apex1 = 0.45 * std::min(field.sigma_plus(), apex_lim);
    if (!(apex1 > start)) throw DomainError("ft_embedded: 1-D contour cannot stay in the strip");
    cplx one_d = one_d_integral(x - a, apex1, true, 1.0 + model_.order(), w0, opt_.eps,
                                opt_.mesh_safety);
    for (int which = 0; which < 2; ++which) {
        const cplx p = which == 0 ? -iu * beta_shift : -iu * (1.0 + beta_shift);
        if (p.imag() > start && p.imag() < apex1) {
            const cplx res =
                (which == 0 ? iu * K : -iu * K) * pref / (qs + model_.psi(p + iu * beta_shift));
            one_d += iu * std::exp(iu * (x - a) * p) * res;
        }
    }
    return v + one_d;
}

cplx LaplacePricer::ft_product_laplace(double q, double x, const Vanilla& va,
                                       const Vanilla& vb) const {
    if (!(x > h_)) throw DomainError("barrier: spot must be above the barrier");
    const double a1 = std::log(va.strike), a2 = std::log(vb.strike);
    if ((a1 < h_ && h_ - a1 < 0.005) || (a2 < h_ && h_ - a2 < 0.005))
        throw NumericError(
            "ft_product: strike too close to the barrier for double-precision flat sums");
    auto& qd = qdata(q);
    const auto& field = qd.field;
    const double dx = x - h_;
    const double nu = model_.order();

    // per-leg axis: sinh with wings down when the strike is at or above the
    // barrier, flat line in the leg's own strip otherwise
    struct Axis {
        bool flat = false;
        double zeta = 0, a_osc = 0;
        std::vector<cplx> eta;
        std::vector<cplx> w;  // sinh: full weights; flat: sample factors for sum_by_parts
    };
    auto build_axis = [&](const Vanilla& v) {
        Axis ax;
        const double a = std::log(v.strike);
        auto rat = [&](cplx e) { return -v.strike / (e * (e + iu)); };
        if (a >= h_) {
            if (v.kind == OptionKind::Put)
                throw DomainError("ft_product: puts above the barrier must be parity-expanded");
            const double lo = 0.97 * std::max(field.sigma_minus(), model_.lambda_minus());
            if (!(lo < -2.0))
                throw DomainError("ft_product: needs lambda_- < -2 and beta^+_q > 2");
            const double wing = 0.8 * std::min(0.5 * pi, 0.5 * pi / nu);
            // keep q + psi(eta1) + psi(eta2) well away from zero at the apexes
            double apex = std::min(-1.15, 0.55 * lo);
            for (double frac : {0.55, 0.35, 0.2, 0.1}) {
                apex = std::min(-1.15, frac * lo);
                const double val = q + 2.0 * model_.psi(cplx(0.0, apex)).real();
                if (val > 0.15 * q) break;
            }
            SinhContour c;
            c.omega = -wing;
            c.b = -apex / std::sin(wing);
            c.omega1 = 0.0;
            DecayModel dm;
            dm.strip_half_width = 0.5 * std::min(wing, 0.5 * pi - wing);
            dm.b = c.b;
            dm.poly_decay = 1.0 + 0.5 * nu;
            dm.kappa_exp = std::max(kDxFloor, a - h_) * std::sin(wing);
            dm.nu_exp = 1.0;
            const TrapezoidGrid g = select_grid(dm, opt_.eps * 10, opt_.mesh_safety);
            for (int k = -g.N; k <= g.N; ++k) {
                const double y = k * g.zeta;
                const cplx e = c.point(y);
                ax.eta.push_back(e);
                ax.w.push_back(g.zeta * c.deriv(y) / (2.0 * pi) *
                               std::exp(-iu * (a - h_) * e) * rat(e));
            }
            return ax;
        }
        ax.flat = true;
        const double om = (v.kind == OptionKind::Put)
                              ? std::min(0.35, 0.2 * field.sigma_plus())
                              : -1.0 - 0.3 * std::min(1.0, std::abs(field.sigma_minus()) - 1.0);
        const double strip = 0.7 * std::min(std::abs(om), 1.0 - std::abs(om) * 0.99);
        ax.zeta = 2.0 * pi * strip / std::log(1e8);
        ax.a_osc = a - h_;
        const double tail_pow = 1.0 + nu + opt_.sbp_iterations;
        const double t0 = std::max(30.0, std::pow(1e7, 1.0 / tail_pow));
        const int N = static_cast<int>(std::ceil(t0 / ax.zeta));
        for (int k = -N; k <= N; ++k) {
            const cplx e(k * ax.zeta, om);
            ax.eta.push_back(e);
            // the oscillation e^{-i a_osc zeta k} lives in sum_by_parts
            ax.w.push_back(std::exp(ax.a_osc * om) * rat(e) / (2.0 * pi));
        }
        return ax;
    };
    const Axis ax1 = build_axis(va), ax2 = build_axis(vb);
    const double off = (ax1.flat ? ax1.eta.front().imag() : 0.0) +
                       (ax2.flat ? ax2.eta.front().imag() : 0.0);
    if (!(qd.up_c.apex() > off + 0.05))
        throw NumericError("ft_product: outer contour does not clear the flat axes");

    std::vector<cplx> psi1(ax1.eta.size()), psi2(ax2.eta.size());
    for (size_t i = 0; i < ax1.eta.size(); ++i) psi1[i] = model_.psi(ax1.eta[i]);
    for (size_t j = 0; j < ax2.eta.size(); ++j) psi2[j] = model_.psi(ax2.eta[j]);
    // phi^- at the pairwise sums; reused across xi
    std::vector<std::vector<cplx>> phim(ax1.eta.size(), std::vector<cplx>(ax2.eta.size()));
    double min_denom = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < ax1.eta.size(); ++i)
        for (size_t j = 0; j < ax2.eta.size(); ++j) {
            phim[i][j] = field.phi_minus(ax1.eta[i] + ax2.eta[j]);
            min_denom = std::min(min_denom, std::abs(q + psi1[i] + psi2[j]));
        }
    if (!(min_denom > 1e-6 * q))
        throw NumericError("ft_product: q + psi(eta1) + psi(eta2) nearly vanishes on the axes");

    std::vector<cplx> buf2(ax2.eta.size()), buf1(ax1.eta.size());
    auto zfun = [&](cplx xi) {
        for (size_t i = 0; i < ax1.eta.size(); ++i) {
            for (size_t j = 0; j < ax2.eta.size(); ++j) {
                const cplx s = ax1.eta[i] + ax2.eta[j];
                buf2[j] = ax2.w[j] / (phim[i][j] * iu * (s - xi) * (q + psi1[i] + psi2[j]));
            }
            buf1[i] = ax2.flat ? sum_by_parts(ax2.zeta, ax2.a_osc, buf2, opt_.sbp_iterations)
                               : std::accumulate(buf2.begin(), buf2.end(), cplx(0.0));
            buf1[i] *= ax1.w[i];
        }
        if (ax1.flat) return sum_by_parts(ax1.zeta, ax1.a_osc, buf1, opt_.sbp_iterations);
        return std::accumulate(buf1.begin(), buf1.end(), cplx(0.0));
    };
    return qd.outer(dx, zfun);
}

double LaplacePricer::invert(double T, const std::function<cplx(double)>& vtilde,
                             double discount) const {
    const double ln2 = std::log(2.0);
    const int n = opt_.gs.sample_count();
    std::vector<double> samples(n);
    for (int k = 1; k <= n; ++k) qdata(k * ln2 / T);  // build fields up front
    if (opt_.threads > 1) {
        std::vector<std::future<double>> futs(n);
        for (int k = 1; k <= n; ++k)
            futs[k - 1] =
                std::async(std::launch::async, [&, k] { return vtilde(k * ln2 / T).real(); });
        for (int k = 0; k < n; ++k) samples[k] = futs[k].get();
    } else {
        for (int k = 1; k <= n; ++k) samples[k - 1] = vtilde(k * ln2 / T).real();
    }
    const double v = invert_from_samples(samples, T, opt_.gs);
    return std::exp(-discount * T) * v;
}

double LaplacePricer::notouch_price(double T, double x, const PayoffTransform& truncated,
                                    int rate_mult) const {
    return invert(
        T, [&](double q) { return notouch_laplace(q, x, truncated); }, rate_mult * r_);
}

Digitals barrier_digitals(const CharExponent& model, double r, double h, double T, double x,
                          const BarrierOptions& opt) {
    LaplacePricer lp(model, r, h, opt);
    if (!(std::log(2.0) / T - r > 0))
        throw DomainError("barrier_digitals: q - r <= 0 on the GS grid (increase T or M)");
    Digitals d;
    d.v_nt = lp.invert(
        T, [&](double q) { return cplx((1.0 - lp.survival_transform(q, x)) / q, 0.0); }, r);
    d.v_ft = lp.invert(
        T, [&](double q) { return cplx(lp.survival_transform(q, x) / (q - r), 0.0); }, r);
    return d;
}

double ft_power(const CharExponent& model, double r, double h, double T, double x, double beta,
                int rate_mult, const BarrierOptions& opt) {
    LaplacePricer lp(model, r, h, opt);
    const double R = rate_mult * r;
    return lp.invert(
        T, [&](double q) { return lp.ft_power_laplace(q, x, beta, R); }, R);
}

double ft_embedded_vanilla(const CharExponent& model, double r, double h, double T, double x,
                           OptionKind kind, double K, const BarrierOptions& opt) {
    LaplacePricer lp(model, r, h, opt);
    return lp.invert(
        T, [&](double q) { return lp.ft_embedded_laplace(q, x, kind, K, r); }, r);
}

namespace {

// parity pieces of a vanilla value function:
// V_put(theta,y) = V_call(theta,y) - e^y + K e^{-r theta}
struct ValuePiece {
    double coef = 1.0;
    bool vanilla = false;
    double strike = 1.0;
    double beta = 0.0;            // e^{beta y}
    double theta_discount = 0.0;  // e^{-c theta}
};

std::vector<ValuePiece> expand_leg(const ProductLeg& leg, double r) {
    std::vector<ValuePiece> out;
    if (leg.type == ProductLeg::Type::PowerLeg) {
        out.push_back({1.0, false, 1.0, leg.beta, 0.0});
    } else if (leg.kind == OptionKind::Call) {
        out.push_back({1.0, true, leg.strike, 0.0, 0.0});
    } else {
        out.push_back({1.0, true, leg.strike, 0.0, 0.0});
        out.push_back({-1.0, false, 1.0, 1.0, 0.0});
        out.push_back({leg.strike, false, 1.0, 0.0, r});
    }
    return out;
}

}  // namespace

double ft_product(const CharExponent& model, double r, double h, double T, double x,
                  const ProductLeg& left, const ProductLeg& right, const BarrierOptions& opt) {
    LaplacePricer lp(model, r, h, opt);
    const double R = 2.0 * r;
    const bool left_below =
        left.type == ProductLeg::Type::VanillaLeg && std::log(left.strike) < h;
    const bool right_below =
        right.type == ProductLeg::Type::VanillaLeg && std::log(right.strike) < h;

    if (left_below && right_below) {
        return lp.invert(
            T,
            [&](double q) {
                return lp.ft_product_laplace(q, x, {left.kind, left.strike},
                                             {right.kind, right.strike});
            },
            R);
    }
    if (left_below || right_below) {
        const auto& below = left_below ? left : right;
        const auto& other = left_below ? right : left;
        if (other.type == ProductLeg::Type::PowerLeg) {
            return lp.invert(
                T,
                [&](double q) {
                    return lp.ft_embedded_laplace(q, x, below.kind, below.strike, R, 0.0,
                                                  other.beta, true);
                },
                R);
        }
        // vanilla (>= H) x vanilla (< H): expand the upper leg if it is a put
        const auto pieces = expand_leg(other, r);
        return lp.invert(
            T,
            [&](double q) {
                cplx acc = 0;
                for (const auto& pc : pieces) {
                    if (pc.vanilla)
                        acc += pc.coef * lp.ft_product_laplace(q, x, {OptionKind::Call, pc.strike},
                                                               {below.kind, below.strike});
                    else
                        acc += pc.coef * lp.ft_embedded_laplace(q, x, below.kind, below.strike, R,
                                                                pc.theta_discount, pc.beta, true);
                }
                return acc;
            },
            R);
    }
    const auto pa = expand_leg(left, r);
    const auto pb = expand_leg(right, r);
    return lp.invert(
        T,
        [&](double q) {
            cplx acc = 0;
            for (const auto& A : pa)
                for (const auto& B : pb) {
                    const double coef = A.coef * B.coef;
                    if (A.vanilla && B.vanilla)
                        acc += coef * lp.ft_product_laplace(q, x, {OptionKind::Call, A.strike},
                                                            {OptionKind::Call, B.strike});
                    else if (A.vanilla || B.vanilla) {
                        const auto& v = A.vanilla ? A : B;
                        const auto& s = A.vanilla ? B : A;
                        acc += coef * lp.ft_embedded_laplace(q, x, OptionKind::Call, v.strike, R,
                                                             s.theta_discount, s.beta, true);
                    } else {
                        acc += coef * lp.ft_embedded_laplace(q, x, OptionKind::Call, 1.0, R,
                                                             A.theta_discount + B.theta_discount,
                                                             A.beta + B.beta, false);
                    }
                }
            return acc;
        },
        R);
}

double notouch_price(const CharExponent& model, double r, double h, double T, double x,
                     const PiecewiseExpPayoff& payoff, int rate_mult, const BarrierOptions& opt) {
    LaplacePricer lp(model, r, h, opt);
    const auto transform = PayoffTransform::from_payoff(payoff.truncated_below(h));
    return lp.notouch_price(T, x, transform, rate_mult);
}

double down_and_out_call(const CharExponent& model, double r, double h, double T, double x,
                         double K, const BarrierOptions& opt) {
    return notouch_price(model, r, h, T, x, PiecewiseExpPayoff::vanilla({OptionKind::Call, K}), 1,
                         opt);
}

}  // namespace levy
