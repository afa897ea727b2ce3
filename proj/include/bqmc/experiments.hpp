#pragma once

#include "bqmc/estimator.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bqmc {

struct RatioRow {
    std::string config;
    Method method = Method::QMC_LT;
    /// sigma-hat of the comparison method.
    double sigma = 0.0;
    /// 100 * sigma_baseline / sigma_method.
    double ratio_pct = 0.0;
    double mean = 0.0;
};

struct RatioTable {
    std::vector<RatioRow> rows;
    /// Baseline summary per config, in config order.
    std::vector<EstimateSummary> baselines;
    /// Comparison summaries, parallel to `rows`.
    std::vector<EstimateSummary> summaries;
};

/// Progress hook: (config name, method) before each estimate.
using ProgressFn = std::function<void(const std::string&, Method)>;

/// One row per (config, comparison method); comparisons default to each
/// config's method list minus its baseline when `comparisons` is empty.
RatioTable variance_ratio_table(const std::vector<ExperimentConfig>& configs,
                                std::optional<Method> baseline = std::nullopt,
                                const std::vector<Method>& comparisons = {}, const ProgressFn& progress = {});

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};
/// Ordinary least squares y = intercept + slope x (needs two distinct x).
LinearFit ols_fit(const std::vector<double>& x, const std::vector<double>& y);

struct ConvergencePoint {
    std::size_t n = 0;
    double mean = 0.0;
    double sigma = 0.0;
};

struct ConvergenceResult {
    Method method = Method::QMC_LT;
    /// log sigma = beta - alpha log N.
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<ConvergencePoint> points;
    /// Budgets dropped because sigma-hat was 0.
    std::vector<std::size_t> excluded;
};

/// Powers of two 2^lo .. 2^hi.
std::vector<std::size_t> power_of_two_grid(int lo = 6, int hi = 13);

/// Regression of sigma-hat on N with config.m_shifts replications per budget.
ConvergenceResult convergence_alpha(const ExperimentConfig& config, Method method,
                                    const std::vector<std::size_t>& n_grid);

double black_scholes_put(double s0, double strike, double sigma, double rate, double maturity);

/// Continuously monitored down-&-in put (no rebate), valid for 0 < B <= S0 and
/// B < K; throws std::domain_error elsewhere.
double analytic_down_in_put(double s0, double strike, double barrier, double sigma, double rate, double maturity);

}  // namespace bqmc
