#pragma once

#include "bqmc/contracts.hpp"
#include "bqmc/estimator.hpp"
#include "bqmc/market.hpp"

#include <Eigen/Dense>

#include <random>

namespace testing_support {

inline Eigen::MatrixXd p2_correlation() {
    Eigen::MatrixXd p(4, 4);
    p << 1, -0.5, 0.6, 0.2, -0.5, 1, -0.2, -0.1, 0.6, -0.2, 1, 0.25, 0.2, -0.1, 0.25, 1;
    return p;
}

/// Four-asset basket market, m = 130, T = 1/2.
inline bqmc::MarketSpec basket_market(bool p2, double sigma1, std::size_t steps = 130) {
    bqmc::MarketSpec m;
    m.s0 = {100, 100, 100, 100};
    m.sigma = {sigma1, 0.25, 0.25, 0.35};
    m.rho = p2 ? p2_correlation() : bqmc::uniform_correlation(4, 0.6);
    m.rate = 0.05;
    m.maturity = 0.5;
    m.steps = steps;
    return m;
}

inline bqmc::ContractSpec basket_contract(double barrier, double strike,
                                          bqmc::BarrierType type = bqmc::BarrierType::knock_out) {
    bqmc::ContractSpec c;
    c.family = bqmc::PayoffFamily::asian_basket_call;
    c.strike = strike;
    c.barriers.push_back({0, barrier, bqmc::Direction::up, type});
    return c;
}

/// Two-asset, two-date market with a mixed-sign first transform column.
inline bqmc::MarketSpec mixed_sign_market(double rho = -0.72) {
    bqmc::MarketSpec m;
    m.s0 = {1, 1};
    m.sigma = {0.4, 0.6};
    m.rho = bqmc::uniform_correlation(2, rho);
    m.rate = 0.08;
    m.maturity = 1.0;
    m.steps = 2;
    return m;
}

inline bqmc::ContractSpec mixed_sign_contract() {
    bqmc::ContractSpec c;
    c.family = bqmc::PayoffFamily::binary_asian;
    c.strike = 1.0;
    c.barriers.push_back({0, 1.1, bqmc::Direction::up, bqmc::BarrierType::knock_out});
    return c;
}

/// Small basket used by fast unit tests: 2 assets, 4 dates.
inline bqmc::MarketSpec small_market(double rho = 0.4) {
    bqmc::MarketSpec m;
    m.s0 = {100, 95};
    m.sigma = {0.3, 0.2};
    m.rho = bqmc::uniform_correlation(2, rho);
    m.rate = 0.05;
    m.maturity = 0.5;
    m.steps = 4;
    return m;
}

inline Eigen::MatrixXd random_spd(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = g(rng);
    return m * m.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
}

inline double combined_se(const bqmc::EstimateSummary& a, const bqmc::EstimateSummary& b) {
    return std::sqrt(*a.std_error * *a.std_error + *b.std_error * *b.std_error);
}

}  // namespace testing_support
