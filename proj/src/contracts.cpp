#include "bqmc/contracts.hpp"

#include "bqmc/normal.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bqmc {

bool ContractSpec::knock_in() const noexcept {
    for (const auto& clause : barriers)
        if (clause.type == BarrierType::knock_in) return true;
    return false;
}

std::vector<double> ContractSpec::resolved_weights(const MarketSpec& spec) const {
    if (!weights.empty()) return weights;
    return std::vector<double>(spec.dimension(), 1.0 / static_cast<double>(spec.dimension()));
}

void ContractSpec::validate(const MarketSpec& spec) const {
    if (!weights.empty()) {
        if (weights.size() != spec.dimension())
            throw std::invalid_argument("weights must have one entry per (asset, date)");
        for (double w : weights)
            if (!(w >= 0.0)) throw std::invalid_argument("weights must be non-negative");
    }
    std::size_t knock_ins = 0;
    for (const auto& clause : barriers) {
        if (clause.asset >= spec.assets())
            throw std::invalid_argument("barrier asset index " + std::to_string(clause.asset) + " out of range");
        if (!(clause.level > 0.0)) throw std::invalid_argument("barrier level must be positive");
        if (clause.type == BarrierType::knock_in) ++knock_ins;
    }
    if (knock_ins > 0 && barriers.size() > 1)
        throw std::invalid_argument("a contract holds either one knock-in clause or knock-out clauses only");
    if (family == PayoffFamily::vanilla_put && put_asset >= spec.assets())
        throw std::invalid_argument("put asset index out of range");
}

double barrier_threshold(const MarketSpec& spec, const BarrierClause& clause, std::size_t j) {
    const double s = spec.sigma[clause.asset];
    return std::log(clause.level / spec.s0[clause.asset]) - (spec.rate - 0.5 * s * s) * spec.time(j);
}

double smooth_payoff(std::span<const double> prices, const MarketSpec& spec, const ContractSpec& contract) {
    switch (contract.family) {
    case PayoffFamily::asian_basket_call:
    case PayoffFamily::binary_asian: {
        double average = 0.0;
        if (contract.weights.empty()) {
            for (double p : prices) average += p;
            average /= static_cast<double>(prices.size());
        } else {
            for (std::size_t i = 0; i < prices.size(); ++i) average += contract.weights[i] * prices[i];
        }
        if (contract.family == PayoffFamily::asian_basket_call) return average - contract.strike;
        return average >= contract.strike ? 1.0 : 0.0;
    }
    case PayoffFamily::binary:
        return 1.0;
    case PayoffFamily::vanilla_put:
        return contract.strike - prices[spec.row(contract.put_asset, spec.steps - 1)];
    }
    return 0.0;
}

namespace {

std::vector<double> row_major_prices(const Eigen::MatrixXd& paths) {
    std::vector<double> prices(static_cast<std::size_t>(paths.size()));
    std::size_t k = 0;
    for (Eigen::Index a = 0; a < paths.rows(); ++a)
        for (Eigen::Index j = 0; j < paths.cols(); ++j) prices[k++] = paths(a, j);
    return prices;
}

}  // namespace

double smooth_payoff(const Eigen::MatrixXd& paths, const MarketSpec& spec, const ContractSpec& contract) {
    return smooth_payoff(row_major_prices(paths), spec, contract);
}

bool clause_indicator(std::span<const double> prices, std::size_t steps, const BarrierClause& clause) {
    const double* p = prices.data() + clause.asset * steps;
    bool survived = true;
    if (clause.direction == Direction::up) {
        for (std::size_t j = 0; j < steps && survived; ++j) survived = p[j] < clause.level;
    } else {
        for (std::size_t j = 0; j < steps && survived; ++j) survived = p[j] > clause.level;
    }
    return clause.type == BarrierType::knock_out ? survived : !survived;
}

bool barrier_indicator(std::span<const double> prices, std::size_t steps, const ContractSpec& contract) {
    for (const auto& clause : contract.barriers)
        if (!clause_indicator(prices, steps, clause)) return false;
    return true;
}

double evaluate_payoff(std::span<const double> prices, const ContractSpec& contract, const MarketSpec& spec) {
    if (!barrier_indicator(prices, spec.steps, contract)) return 0.0;
    const double f = smooth_payoff(prices, spec, contract);
    return f > 0.0 ? std::exp(-spec.rate * spec.maturity) * f : 0.0;
}

double evaluate_payoff(const Eigen::MatrixXd& paths, const ContractSpec& contract, const MarketSpec& spec) {
    return evaluate_payoff(row_major_prices(paths), contract, spec);
}

double survival_probability(double s_now, const MarketSpec& spec, const BarrierClause& clause, double dt) {
    const double s = spec.sigma[clause.asset];
    const double h = (std::log(clause.level / s_now) - (spec.rate - 0.5 * s * s) * dt) / (s * std::sqrt(dt));
    return clause.direction == Direction::up ? norm_cdf(h) : norm_cdf(-h);
}

double survival_probability(double s_now, const MarketSpec& spec, const BarrierClause& clause) {
    return survival_probability(s_now, spec, clause, spec.maturity / static_cast<double>(spec.steps));
}

}  // namespace bqmc
