#pragma once

#include <Eigen/Dense>
#include <string>

#include "levy/barrier.hpp"
#include "levy/european.hpp"

namespace levy {

struct BarrierHedgeProblem {
    OptionKind target_kind = OptionKind::Call;
    double K = 1.04;  // target strike, above the barrier
    double H = 1.0;
    double T = 0.1;
    std::vector<double> put_strikes;  // hedging puts (typically below the barrier)
    bool use_first_touch = false;
    double x0 = 0.04;  // ln(S/H)
};

struct HedgeInstrument {
    enum class Type { Put, FirstTouchDigital };
    Type type = Type::Put;
    double strike = 1.0;
};

struct HedgePortfolio {
    std::vector<HedgeInstrument> instruments;
    std::vector<double> numbers;         // option counts n_j
    std::vector<double> dollar_weights;  // n_j V_j(0) / V_0, the units of the tables
    std::vector<double> instrument_prices;
    double target_price = 0;  // V_0 at x0
    double bond0 = 0;         // V_0 - sum n_j V_j(0)
    double n_std = 0;         // sqrt(Var_P) / V_0
};

/// covariance data of the liquidation values: entry (j,l) of `a` is
/// C_{jl} - C^0_{jl} with index 0 the target
struct BarrierCovariance {
    std::vector<std::string> names;
    Eigen::VectorXd price;  // V_j(0, x)
    Eigen::MatrixXd a;
};

BarrierCovariance barrier_covariance(const CharExponent& model, double r,
                                     const BarrierHedgeProblem& problem,
                                     const BarrierOptions& opt = {});

/// semi-static portfolio: static Sobolev weights of the exotic replicating
/// payoff, with the kink amount of K1-puts fixed
HedgePortfolio semistatic_portfolio(const CharExponent& model, double r,
                                    const BarrierHedgeProblem& problem,
                                    const SobolevSpec& spec, const BarrierOptions& opt = {});

/// variance-minimizing weights from the barrier covariance matrix
HedgePortfolio vm_barrier_weights(const CharExponent& model, double r,
                                  const BarrierHedgeProblem& problem,
                                  const BarrierOptions& opt = {});

/// F(t) = P^x(tau <= t)
std::vector<double> breach_cdf(const CharExponent& model, double h, double x,
                               const std::vector<double>& t_grid, const BarrierOptions& opt = {});

struct BetRow {
    double t_lo = 0, t_hi = 0;  // breach-time bin; t_lo == t_hi == T means "no breach"
    bool no_breach = false;
    double probability = 0;
    double payoff = 0;  // portfolio value in units of V_0
};

std::vector<BetRow> bet_table(const CharExponent& model, double r,
                              const BarrierHedgeProblem& problem, const HedgePortfolio& portfolio,
                              const std::vector<std::pair<double, double>>& bins,
                              double spot_at_breach, const BarrierOptions& opt = {});

struct Surface {
    std::vector<double> tau_grid, spot_grid;
    std::vector<std::vector<double>> value;  // [tau][spot], units of V_0
};

Surface payoff_surface(const CharExponent& model, double r, const BarrierHedgeProblem& problem,
                       const HedgePortfolio& portfolio, const std::vector<double>& tau_grid,
                       const std::vector<double>& spot_grid, bool include_bond,
                       const BarrierOptions& opt = {});

}  // namespace levy
