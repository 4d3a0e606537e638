#include "levy/hedge.hpp"

#include <cmath>

namespace levy {

namespace {

std::vector<HedgeInstrument> instrument_list(const BarrierHedgeProblem& p) {
    std::vector<HedgeInstrument> out;
    if (p.use_first_touch) out.push_back({HedgeInstrument::Type::FirstTouchDigital, 0.0});
    for (double k : p.put_strikes) out.push_back({HedgeInstrument::Type::Put, k});
    return out;
}

double target_price(const CharExponent& model, double r, const BarrierHedgeProblem& p,
                    const BarrierOptions& opt) {
    if (p.target_kind != OptionKind::Call)
        throw DomainError("barrier hedge: only down-and-in call targets are supported");
    return ft_embedded_vanilla(model, r, std::log(p.H), p.T, p.x0 + std::log(p.H),
                               OptionKind::Call, p.K, opt);
}

double instrument_price(const CharExponent& model, double r, const BarrierHedgeProblem& p,
                        const HedgeInstrument& inst, const BarrierOptions& opt) {
    const double x = p.x0 + std::log(p.H);
    if (inst.type == HedgeInstrument::Type::FirstTouchDigital)
        return barrier_digitals(model, r, std::log(p.H), p.T, x, opt).v_ft;
    return price_european(model, r, p.T, x, vanilla_transform(OptionKind::Put, inst.strike),
                          {opt.eps, 1.0});
}

}  // namespace

BarrierCovariance barrier_covariance(const CharExponent& model, double r,
                                     const BarrierHedgeProblem& problem,
                                     const BarrierOptions& opt) {
    const double h = std::log(problem.H);
    const double x = problem.x0 + h;
    const double T = problem.T;
    const auto instruments = instrument_list(problem);
    const int n = static_cast<int>(instruments.size());

    BarrierCovariance cov;
    cov.names.push_back("Target");
    for (const auto& inst : instruments)
        cov.names.push_back(inst.type == HedgeInstrument::Type::FirstTouchDigital
                                ? "FT"
                                : "Put(" + std::to_string(inst.strike) + ")");

    cov.price.resize(n + 1);
    cov.price(0) = target_price(model, r, problem, opt);
    for (int j = 0; j < n; ++j)
        cov.price(j + 1) = instrument_price(model, r, problem, instruments[j], opt);

    auto leg = [&](int idx) {
        if (idx == 0) return ProductLeg::vanilla(OptionKind::Call, problem.K);
        const auto& inst = instruments[idx - 1];
        if (inst.type == HedgeInstrument::Type::FirstTouchDigital) return ProductLeg::power(0.0);
        return ProductLeg::vanilla(OptionKind::Put, inst.strike);
    };
    auto payoff = [&](int idx) -> PiecewiseExpPayoff {
        if (idx == 0) return PiecewiseExpPayoff::vanilla({OptionKind::Call, problem.K});
        const auto& inst = instruments[idx - 1];
        if (inst.type == HedgeInstrument::Type::FirstTouchDigital)
            return PiecewiseExpPayoff{};  // worthless at maturity without a breach
        return PiecewiseExpPayoff::vanilla({OptionKind::Put, inst.strike});
    };

    Eigen::MatrixXd second(n + 1, n + 1);
    for (int j = 0; j <= n; ++j) {
        for (int k = j; k <= n; ++k) {
            double c = ft_product(model, r, h, T, x, leg(j), leg(k), opt);
            // no-touch part: the terminal product through the surviving paths;
            // the target contributes only through the first-touch leg
            if (j != 0 && k != 0) {
                const auto pj = payoff(j), pk = payoff(k);
                if (!pj.pieces.empty() && !pk.pieces.empty()) {
                    const auto prod = PiecewiseExpPayoff::product(pj, pk).truncated_below(h);
                    const auto tr = PayoffTransform::from_payoff(prod);
                    if (!tr.empty_support) c += notouch_price(model, r, h, T, x, prod, 2, opt);
                }
            } else if (j == 0 && k == 0) {
                const auto prod =
                    PiecewiseExpPayoff::product(payoff(0), payoff(0)).truncated_below(h);
                // down-and-in target: worthless at maturity if never touched
                (void)prod;
            }
            second(j, k) = c;
            second(k, j) = c;
        }
    }
    cov.a.resize(n + 1, n + 1);
    for (int j = 0; j <= n; ++j)
        for (int k = 0; k <= n; ++k)
            cov.a(j, k) = second(j, k) - cov.price(j) * cov.price(k);
    return cov;
}

HedgePortfolio semistatic_portfolio(const CharExponent& model, double r,
                                    const BarrierHedgeProblem& problem, const SobolevSpec& spec,
                                    const BarrierOptions& opt) {
    if (!(problem.K > problem.H)) throw DomainError("semistatic: requires K0 > H");
    const auto beta_opt = symmetry_beta(model);
    // the construction is still carried out when the symmetry fails; the
    // caller sees it through the returned flag-free weights (paper studies
    // exactly this misuse)
    const double beta = beta_opt ? *beta_opt
                                 : -(model.lambda_plus() + model.lambda_minus());
    const double K1 = problem.H * problem.H / problem.K;

    const auto target = exotic_semistatic_transform(problem.H, problem.K, beta, 1);
    std::vector<PayoffTransform> puts;
    for (double k : problem.put_strikes) puts.push_back(vanilla_transform(OptionKind::Put, k));

    SobolevSpec s = spec;
    if (s.omega == 0) s.omega = 2.0 * std::max(0.0, 1.0 - beta) + 0.1;
    const auto gram = sobolev_gram(s, target, puts, {1e-11, 1.0});
    std::optional<double> fixed;
    if (!problem.put_strikes.empty() && std::abs(problem.put_strikes.front() - K1) < 1e-9)
        fixed = std::pow(problem.H, -beta) * problem.K * std::pow(K1, beta - 1.0);
    const auto numbers = static_weights(gram, fixed);

    HedgePortfolio pf;
    for (double k : problem.put_strikes) pf.instruments.push_back({HedgeInstrument::Type::Put, k});
    pf.numbers = numbers;
    pf.target_price = target_price(model, r, problem, opt);
    double cost = 0;
    for (size_t j = 0; j < pf.instruments.size(); ++j) {
        const double pj = instrument_price(model, r, problem, pf.instruments[j], opt);
        pf.instrument_prices.push_back(pj);
        pf.dollar_weights.push_back(numbers[j] * pj / pf.target_price);
        cost += numbers[j] * pj;
    }
    pf.bond0 = pf.target_price - cost;

    // variance of the portfolio under the same functional as the VM weights
    BarrierHedgeProblem pv = problem;
    pv.use_first_touch = false;
    const auto cov = barrier_covariance(model, r, pv, opt);
    const int n = static_cast<int>(numbers.size());
    double var = cov.a(0, 0);
    for (int j = 0; j < n; ++j) {
        var -= 2.0 * numbers[j] * cov.a(0, j + 1);
        for (int k = 0; k < n; ++k) var += numbers[j] * numbers[k] * cov.a(j + 1, k + 1);
    }
    pf.n_std = std::sqrt(std::max(0.0, var)) / pf.target_price;
    return pf;
}

HedgePortfolio vm_barrier_weights(const CharExponent& model, double r,
                                  const BarrierHedgeProblem& problem, const BarrierOptions& opt) {
    const auto cov = barrier_covariance(model, r, problem, opt);
    const int n = static_cast<int>(cov.price.size()) - 1;
    Eigen::MatrixXd A = cov.a.block(1, 1, n, n);
    Eigen::VectorXd B = cov.a.block(1, 0, n, 1);

    Eigen::VectorXd w;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    bool regularized = false;
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        w = ldlt.solve(B);
    } else {
        // near-rank-deficient covariance: truncated spectral pseudo-inverse
        regularized = true;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
        const double thresh = 1e-10 * A.trace();
        Eigen::VectorXd inv = es.eigenvalues();
        for (int i = 0; i < n; ++i) inv(i) = inv(i) > thresh ? 1.0 / inv(i) : 0.0;
        w = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose() * B;
    }
    (void)regularized;

    HedgePortfolio pf;
    pf.instruments = instrument_list(problem);
    pf.target_price = cov.price(0);
    double var = cov.a(0, 0);
    double cost = 0;
    for (int j = 0; j < n; ++j) {
        pf.numbers.push_back(w(j));
        pf.instrument_prices.push_back(cov.price(j + 1));
        pf.dollar_weights.push_back(w(j) * cov.price(j + 1) / pf.target_price);
        cost += w(j) * cov.price(j + 1);
        var -= 2.0 * w(j) * B(j);
    }
    var += w.dot(A * w);
    pf.bond0 = pf.target_price - cost;
    pf.n_std = std::sqrt(std::max(0.0, var)) / pf.target_price;
    return pf;
}

std::vector<double> breach_cdf(const CharExponent& model, double h, double x,
                               const std::vector<double>& t_grid, const BarrierOptions& opt) {
    std::vector<double> out;
    double prev = -1.0;
    for (double t : t_grid) {
        if (!(t > 0) || t < prev) throw DomainError("breach_cdf: t_grid must be positive increasing");
        prev = t;
        // first-touch digital with the discount forced to zero
        LaplacePricer lp(model, 0.0, h, opt);
        const double f = lp.invert(
            t, [&](double q) { return lp.ft_power_laplace(q, x, 0.0, 0.0); }, 0.0);
        out.push_back(std::clamp(f, 0.0, 1.0));
    }
    return out;
}

namespace {

double portfolio_value_at(const CharExponent& model, double r, const BarrierHedgeProblem& p,
                          const HedgePortfolio& pf, double tau, double spot, bool include_bond,
                          const BarrierOptions& opt) {
    const double theta = p.T - tau;
    const double y = std::log(spot);
    double v = 0;
    // once breached, the down-and-in target is the European vanilla
    if (theta > 0)
        v -= price_european(model, r, theta, y, vanilla_transform(p.target_kind, p.K),
                            {opt.eps, 1.0});
    else
        v -= std::max(spot - p.K, 0.0);
    for (size_t j = 0; j < pf.instruments.size(); ++j) {
        const auto& inst = pf.instruments[j];
        double pj;
        if (inst.type == HedgeInstrument::Type::FirstTouchDigital)
            pj = 1.0;  // the defining event has occurred
        else if (theta > 0)
            pj = price_european(model, r, theta, y, vanilla_transform(OptionKind::Put, inst.strike),
                                {opt.eps, 1.0});
        else
            pj = std::max(inst.strike - spot, 0.0);
        v += pf.numbers[j] * pj;
    }
    if (include_bond) v += pf.bond0 * std::exp(r * tau);
    return v / pf.target_price;
}

}  // namespace

std::vector<BetRow> bet_table(const CharExponent& model, double r,
                              const BarrierHedgeProblem& problem, const HedgePortfolio& portfolio,
                              const std::vector<std::pair<double, double>>& bins,
                              double spot_at_breach, const BarrierOptions& opt) {
    const double h = std::log(problem.H);
    const double x = problem.x0 + h;
    std::vector<double> ts;
    for (auto [lo, hi] : bins) {
        ts.push_back(std::max(lo, 1e-9));
        ts.push_back(hi);
    }
    std::sort(ts.begin(), ts.end());
    const auto cdf = breach_cdf(model, h, x, ts, opt);
    auto F = [&](double t) {
        const auto it = std::lower_bound(ts.begin(), ts.end(), t);
        return cdf[static_cast<size_t>(it - ts.begin())];
    };
    std::vector<BetRow> rows;
    for (auto [lo, hi] : bins) {
        BetRow row;
        row.t_lo = lo;
        row.t_hi = hi;
        row.probability = F(hi) - F(std::max(lo, 1e-9));
        const double tau = 0.5 * (lo + hi);
        row.payoff =
            portfolio_value_at(model, r, problem, portfolio, tau, spot_at_breach, true, opt);
        rows.push_back(row);
    }
    // final row: the barrier is never breached
    BetRow last;
    last.no_breach = true;
    last.t_lo = last.t_hi = problem.T;
    const auto fT = breach_cdf(model, h, x, {problem.T}, opt);
    last.probability = 1.0 - fT[0];
    last.payoff = portfolio.bond0 * std::exp(r * problem.T) / portfolio.target_price;
    rows.push_back(last);
    return rows;
}

Surface payoff_surface(const CharExponent& model, double r, const BarrierHedgeProblem& problem,
                       const HedgePortfolio& portfolio, const std::vector<double>& tau_grid,
                       const std::vector<double>& spot_grid, bool include_bond,
                       const BarrierOptions& opt) {
    Surface s;
    s.tau_grid = tau_grid;
    s.spot_grid = spot_grid;
    for (double tau : tau_grid) {
        if (!(tau < problem.T)) throw DomainError("payoff_surface: tau must be below maturity");
        std::vector<double> row;
        for (double spot : spot_grid) {
            if (spot > problem.H) throw DomainError("payoff_surface: spots must be <= H");
            row.push_back(portfolio_value_at(model, r, problem, portfolio, tau, spot,
                                             include_bond, opt));
        }
        s.value.push_back(row);
    }
    return s;
}

}  // namespace levy
