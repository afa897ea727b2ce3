#pragma once

#include "bqmc/market.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace bqmc {

enum class Direction { up, down };
enum class BarrierType { knock_out, knock_in };

/// Discretely monitored barrier on one asset, checked at every date t_1..t_m.
/// Survival is strict: S < B for up, S > B for down. Knock-in is the
/// complement, so in + out = no barrier holds pathwise.
struct BarrierClause {
    std::size_t asset = 0;
    double level = 0.0;
    Direction direction = Direction::up;
    BarrierType type = BarrierType::knock_out;
};

enum class PayoffFamily { asian_basket_call, binary_asian, binary, vanilla_put };

struct ContractSpec {
    PayoffFamily family = PayoffFamily::asian_basket_call;
    /// Strike K, or the averaging threshold for binary_asian.
    double strike = 0.0;
    /// Averaging weights in row order (asset * m + j); empty means 1/(mn).
    std::vector<double> weights;
    std::vector<BarrierClause> barriers;
    /// Asset the vanilla put is written on.
    std::size_t put_asset = 0;

    bool knock_in() const noexcept;
    /// Weights resolved against a market (default 1/(mn)).
    std::vector<double> resolved_weights(const MarketSpec& spec) const;
    /// Throws std::invalid_argument on inconsistent clauses or weights.
    void validate(const MarketSpec& spec) const;
};

/// b(t_j) = log(B / S(0)) - (r - sigma^2/2) t_j for the clause's asset, j in [0, m).
double barrier_threshold(const MarketSpec& spec, const BarrierClause& clause, std::size_t j);

/// Family-specific inner value f before flooring and indicators. `prices`
/// holds mn prices in row order.
double smooth_payoff(std::span<const double> prices, const MarketSpec& spec, const ContractSpec& contract);
double smooth_payoff(const Eigen::MatrixXd& paths, const MarketSpec& spec, const ContractSpec& contract);

/// 1 when the clause lets the payoff through (survived knock-out / triggered knock-in).
bool clause_indicator(std::span<const double> prices, std::size_t steps, const BarrierClause& clause);
bool barrier_indicator(std::span<const double> prices, std::size_t steps, const ContractSpec& contract);

/// e^{-rT} max(f, 0) times the product of barrier indicators.
double evaluate_payoff(std::span<const double> prices, const ContractSpec& contract, const MarketSpec& spec);
double evaluate_payoff(const Eigen::MatrixXd& paths, const ContractSpec& contract, const MarketSpec& spec);

/// One-step survival probability Gamma of the clause's asset over a step of
/// length dt starting from s_now: P[S(t+dt) < B] for up, P[S(t+dt) > B] for down.
double survival_probability(double s_now, const MarketSpec& spec, const BarrierClause& clause, double dt);
double survival_probability(double s_now, const MarketSpec& spec, const BarrierClause& clause);

}  // namespace bqmc
