#include "levy/wienerhopf.hpp"

#include <cmath>

namespace levy {

namespace {

// real value of psi on the imaginary axis inside the strip
double psi_imag_axis(const CharExponent& m, double t) { return m.psi(cplx(0.0, t)).real(); }

// root of q + psi(i t) = 0 on (lo, hi), assuming sign change; returns nullopt otherwise
std::optional<double> bracket_root(const CharExponent& m, double q, double lo, double hi) {
    auto g = [&](double t) { return q + psi_imag_axis(m, t); };
    double glo = g(lo), ghi = g(hi);
    if (glo * ghi > 0) return std::nullopt;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if (glo * gm < 0) {
            hi = mid;
            ghi = gm;
        } else {
            lo = mid;
            glo = gm;
        }
        if (hi - lo < 1e-15 * (1.0 + std::abs(mid))) break;
    }
    double t = 0.5 * (lo + hi);
    // Newton polish; d/dt psi(i t) = i psi'(i t)
    for (int it = 0; it < 8; ++it) {
        const double gv = g(t);
        const double dv = (iu * m.dpsi(cplx(0.0, t))).real();
        if (dv == 0.0) break;
        const double step = gv / dv;
        const double tn = t - step;
        if (tn <= lo || tn >= hi) break;
        t = tn;
        if (std::abs(step) < 1e-16 * (1.0 + std::abs(t))) break;
    }
    return t;
}

}  // namespace

WhRoots wh_roots(const CharExponent& model, double q) {
    if (!(q > 0)) throw DomainError("wh_roots: q must be positive");
    WhRoots out;
    const double lp = model.lambda_plus(), lm = model.lambda_minus();
    if (model.family() == Family::BM) {
        const double s2 = model.sigma2(), mu = model.mu();
        if (s2 <= 0) throw DomainError("wh_roots: degenerate BM model");
        const double disc = std::sqrt(mu * mu + 2.0 * q * s2);
        out.sigma_plus = (mu + disc) / s2;
        out.sigma_minus = (mu - disc) / s2;
        out.beta_minus = -out.sigma_plus;
        out.beta_plus = -out.sigma_minus;
        return out;
    }
    double hi = std::isfinite(lp) ? lp * (1.0 - 1e-12) : 0.0;
    if (!std::isfinite(lp)) {
        hi = 1.0;
        while (q + psi_imag_axis(model, hi) > 0 && hi < 1e12) hi *= 2.0;
    }
    auto up = bracket_root(model, q, 1e-14, hi);
    double lo = std::isfinite(lm) ? lm * (1.0 - 1e-12) : 0.0;
    if (!std::isfinite(lm)) {
        lo = -1.0;
        while (q + psi_imag_axis(model, lo) > 0 && lo > -1e12) lo *= 2.0;
    }
    auto dn = bracket_root(model, q, lo, -1e-14);
    if (up) out.beta_minus = -*up;
    if (dn) out.beta_plus = -*dn;
    out.sigma_plus = up ? *up : lp;
    out.sigma_minus = dn ? *dn : lm;
    if (!std::isfinite(out.sigma_plus) || !std::isfinite(out.sigma_minus))
        throw NumericError("wh_roots: unbounded strip without roots");
    return out;
}

WhFactorField::WhFactorField(const CharExponent& model, double q, const WhOptions& opt)
    : model_(model), q_(q), opt_(opt) {
    if (!(q > 0)) throw DomainError("WhFactorField: q must be positive");
    find_roots();
    build_side(false);
    build_side(true);
}

void WhFactorField::find_roots() {
    const WhRoots r = wh_roots(model_, q_);
    beta_minus_ = r.beta_minus;
    beta_plus_ = r.beta_plus;
    sigma_plus_ = r.sigma_plus;
    sigma_minus_ = r.sigma_minus;
}

void WhFactorField::build_side(bool upper) {
    const double sigma = upper ? sigma_plus_ : sigma_minus_;
    const double w0 = opt_.wing;
    SinhContour c;
    c.omega = upper ? w0 : -w0;
    c.omega1 = 0.0;
    c.b = opt_.apex_frac * std::abs(sigma) / std::sin(w0);

    // admissible strip in y: wing-angle geometry plus the apex staying inside
    // (0, sigma) with a margin while the strip is tilted
    double v_geo = std::min(w0, 0.5 * pi - w0);
    double v_apex = v_geo;
    for (int it = 0; it < 40; ++it) {
        const double a_hi = c.b * std::sin(w0 + v_apex);
        const double a_lo = c.b * std::sin(w0 - v_apex);
        if (a_hi < 0.97 * std::abs(sigma) && a_lo > 0.01 * std::abs(sigma)) break;
        v_apex *= 0.9;
    }
    DecayModel dm;
    dm.strip_half_width = std::min(opt_.k_d * v_geo, 0.9 * v_apex);
    dm.b = c.b;
    dm.poly_decay = 1.0;
    dm.log_growth = 1.0;
    const TrapezoidGrid grid = select_grid(dm, opt_.eps);

    std::vector<cplx> eta(grid.node_count()), coef(grid.node_count());
    std::vector<cplx> logs(grid.node_count());
    auto log_at = [&](int idx, const cplx& prev, bool have_prev) {
        const cplx z = 1.0 + model_.psi(eta[idx]) / q_;
        if (z.real() < 0 && std::abs(z.imag()) < 1e-14 * std::abs(z.real()))
            throw NumericError("WhFactorField: 1 + psi/q crossed the negative real axis");
        cplx w = std::log(z);
        if (have_prev) {
            double dw = w.imag() - prev.imag();
            while (dw > pi) {
                w -= cplx(0.0, 2.0 * pi);
                dw = w.imag() - prev.imag();
            }
            while (dw < -pi) {
                w += cplx(0.0, 2.0 * pi);
                dw = w.imag() - prev.imag();
            }
            if (std::abs(dw) > 0.9 * pi)
                throw NumericError("WhFactorField: branch tracking lost (refine the grid)");
        }
        return w;
    };
    const int N = grid.N;
    for (int k = -N; k <= N; ++k) eta[k + N] = c.point(k * grid.zeta);
    logs[N] = log_at(N, 0.0, false);
    for (int k = 1; k <= N; ++k) {
        logs[N + k] = log_at(N + k, logs[N + k - 1], true);
        logs[N - k] = log_at(N - k, logs[N - k + 1], true);
    }
    const cplx pref = grid.zeta / (2.0 * pi * iu);
    for (int k = -N; k <= N; ++k) {
        const int j = k + N;
        coef[j] = pref * c.deriv(k * grid.zeta) * logs[j] / eta[j];
    }
    if (upper) {
        cont_p_ = c;
        grid_p_ = grid;
        eta_p_ = std::move(eta);
        coef_p_ = std::move(coef);
    } else {
        cont_m_ = c;
        grid_m_ = grid;
        eta_m_ = std::move(eta);
        coef_m_ = std::move(coef);
    }
}

cplx WhFactorField::exp_cauchy(cplx xi, const std::vector<cplx>& eta,
                               const std::vector<cplx>& coef, double sign) const {
    if (xi == 0.0) return 1.0;
    const int n = static_cast<int>(eta.size());
    const int N = (n - 1) / 2;
    auto term = [&](int j) {
        const cplx d = xi - eta[j];
        if (std::abs(d) < 1e-8)
            throw NumericError("WhFactorField: evaluation point collides with the contour");
        return coef[j] / d;
    };
    cplx acc = term(N);
    for (int k = 1; k <= N; ++k) acc += term(N + k) + term(N - k);
    return std::exp(sign * xi * acc);
}

cplx WhFactorField::phi_plus_direct(cplx xi) const { return exp_cauchy(xi, eta_m_, coef_m_, +1.0); }

cplx WhFactorField::phi_minus_direct(cplx xi) const { return exp_cauchy(xi, eta_p_, coef_p_, -1.0); }

cplx WhFactorField::phi_plus(cplx xi) const {
    // keep a wide berth from the defining contour: the Cauchy discretization
    // degrades when the evaluation point comes close to it
    const double gap = 0.2 * std::abs(sigma_minus_);
    if (xi.imag() >= cont_m_.apex() + gap) return phi_plus_direct(xi);
    return q_ / ((q_ + model_.psi(xi)) * phi_minus_direct(xi));
}

cplx WhFactorField::phi_minus(cplx xi) const {
    const double gap = 0.2 * std::abs(sigma_plus_);
    if (xi.imag() <= cont_p_.apex() - gap) return phi_minus_direct(xi);
    return q_ / ((q_ + model_.psi(xi)) * phi_plus_direct(xi));
}

cplx WhFactorField::phi_minus_residue_upper() const {
    if (!beta_minus_) throw DomainError("phi_minus_residue_upper: upper root does not exist");
    const cplx root(0.0, sigma_plus_);
    return q_ / (model_.dpsi(root) * phi_plus_direct(root));
}

cplx WhFactorField::phi_plus_residue_lower() const {
    if (!beta_plus_) throw DomainError("phi_plus_residue_lower: lower root does not exist");
    const cplx root(0.0, sigma_minus_);
    return q_ / (model_.dpsi(root) * phi_minus_direct(root));
}

cplx wh_factor_extended(const WhFactorField& field, bool plus, cplx xi, bool* used_fallback) {
    const CharExponent& m = field.model();
    const double q = field.q();
    const double s2 = m.sigma2(), mu = m.mu();
    const double nu_jump = m.nu();

    enum { NONE, IV, V, VI, VII } cse = NONE;
    if (s2 > 0) {
        if (!m.has_jumps())
            cse = VII;
        else if (mu == 0.0)
            cse = VI;
        else if (nu_jump < 1.0)
            cse = VII;
    } else if (m.has_jumps() && nu_jump < 1.0 && mu > 0.0) {
        cse = IV;
    } else if (m.has_jumps() && nu_jump < 1.0 && mu < 0.0) {
        cse = V;
    }
    if (cse == NONE) {
        if (used_fallback) *used_fallback = true;
        return plus ? field.phi_plus(xi) : field.phi_minus(xi);
    }
    if (used_fallback) *used_fallback = false;

    double beta_p = 0, beta_m = 0;  // roots of the normalizing factor
    std::function<cplx(cplx)> log_psi_norm;
    cplx prefactor = 1.0;
    switch (cse) {
        case IV:
        case V: {
            log_psi_norm = [&m, q](cplx eta) {
                return std::log((1.0 + m.psi(eta) / q) / (1.0 - iu * m.mu() * eta / q));
            };
            const bool pref_on_plus = (cse == IV);
            if (pref_on_plus == plus) prefactor = 1.0 / (1.0 - iu * mu * xi / q);
            break;
        }
        case VI: {
            beta_p = std::sqrt(2.0 * q) / std::sqrt(s2);
            beta_m = -beta_p;
            log_psi_norm = [&m, q, s2](cplx eta) {
                return std::log((1.0 + m.psi(eta) / q) / (1.0 + eta * eta * s2 / (2.0 * q)));
            };
            // poles of the continued factors sit at -i beta^-+
            prefactor = plus ? beta_p / (beta_p - iu * xi) : beta_m / (beta_m - iu * xi);
            break;
        }
        case VII: {
            const double disc = std::sqrt(mu * mu + 2.0 * q * s2);
            beta_p = (-mu + disc) / s2;
            beta_m = (-mu - disc) / s2;
            log_psi_norm = [&m, q, s2, mu](cplx eta) {
                return std::log((q + m.psi(eta)) /
                                (q - iu * mu * eta + 0.5 * s2 * eta * eta));
            };
            prefactor = plus ? beta_p / (beta_p - iu * xi) : beta_m / (beta_m - iu * xi);
            break;
        }
        default:
            break;
    }

    const SinhContour& c = plus ? field.contour_minus() : field.contour_plus();
    const TrapezoidGrid& g = plus ? field.grid_minus() : field.grid_plus();
    if (!m.has_jumps()) return prefactor;  // Psi == 1, exp factor trivial
    auto integrand = [&](cplx eta) { return xi * log_psi_norm(eta) / (eta * (xi - eta)); };
    const cplx integral = trapezoid_sum(g, c, integrand) / (2.0 * pi * iu);
    return prefactor * std::exp((plus ? 1.0 : -1.0) * integral);
}

}  // namespace levy
