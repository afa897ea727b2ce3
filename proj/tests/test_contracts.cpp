#include "bqmc/contracts.hpp"
#include "bqmc/market.hpp"
#include "bqmc/normal.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace bqmc;
using namespace testing_support;

namespace {

MarketSpec one_asset(double s0, double sigma, double rate, double maturity, std::size_t steps) {
    MarketSpec m;
    m.s0 = {s0};
    m.sigma = {sigma};
    m.rho = Eigen::MatrixXd::Ones(1, 1);
    m.rate = rate;
    m.maturity = maturity;
    m.steps = steps;
    return m;
}

}  // namespace

TEST(BarrierThreshold, Examples) {
    const MarketSpec zero_drift = one_asset(100, 0.3, 0.045, 1.0, 4);
    for (std::size_t j = 0; j < 4; ++j)
        EXPECT_NEAR(barrier_threshold(zero_drift, {0, 100.0, Direction::up, BarrierType::knock_out}, j), 0.0, 1e-17);
    const MarketSpec m = one_asset(100, 0.3, 0.05, 0.5, 1);
    EXPECT_NEAR(barrier_threshold(m, {0, 110.0, Direction::up, BarrierType::knock_out}, 0),
                std::log(1.1) - 0.005 * 0.5, 1e-15);
    EXPECT_GT(barrier_threshold(m, {0, 1e300, Direction::up, BarrierType::knock_out}, 0), 600.0);
}

TEST(SmoothPayoff, FamilyValues) {
    const MarketSpec m = small_market();
    std::vector<double> prices(m.dimension(), 90.0);
    ContractSpec c;
    c.family = PayoffFamily::asian_basket_call;
    c.strike = 90.0;
    EXPECT_EQ(smooth_payoff(prices, m, c), 0.0);
    c.family = PayoffFamily::binary_asian;
    EXPECT_EQ(smooth_payoff(prices, m, c), 1.0);
    c.strike = 90.5;
    EXPECT_EQ(smooth_payoff(prices, m, c), 0.0);
    c.family = PayoffFamily::binary;
    EXPECT_EQ(smooth_payoff(prices, m, c), 1.0);
    c.family = PayoffFamily::vanilla_put;
    c.strike = 100.0;
    prices[m.row(0, m.steps - 1)] = 80.0;
    EXPECT_EQ(smooth_payoff(prices, m, c), 20.0);
}

TEST(SmoothPayoff, ZeroNoisePathOfFirstBasketConfigIsInTheMoney) {
    const MarketSpec m = basket_market(false, 0.25);
    const Eigen::MatrixXd c = cholesky(build_covariance(m)).lower;
    const std::vector<double> z(m.dimension(), 0.0);
    EXPECT_GT(smooth_payoff(asset_paths(m, c, z), m, basket_contract(10000, 70)), 25.0);
}

TEST(SmoothPayoff, MonotoneInEveryPrice) {
    const MarketSpec m = small_market();
    const ContractSpec c = basket_contract(1e9, 95);
    std::vector<double> prices(m.dimension(), 97.0);
    const double base = smooth_payoff(prices, m, c);
    for (std::size_t i = 0; i < prices.size(); ++i) {
        auto bumped = prices;
        bumped[i] += 0.5;
        EXPECT_GT(smooth_payoff(bumped, m, c), base);
    }
}

TEST(EvaluatePayoff, IndicatorsAndDiscount) {
    const MarketSpec m = small_market();
    std::vector<double> prices(m.dimension(), 100.0);
    ContractSpec c = basket_contract(110, 90);
    const double df = std::exp(-m.rate * m.maturity);
    EXPECT_NEAR(evaluate_payoff(prices, c, m), df * 10.0, 1e-14);
    prices[2] = 110.0;  // touching the barrier knocks out
    EXPECT_EQ(evaluate_payoff(prices, c, m), 0.0);
    c.barriers.clear();
    EXPECT_GT(evaluate_payoff(prices, c, m), 0.0);

    ContractSpec put;
    put.family = PayoffFamily::vanilla_put;
    put.strike = 120.0;
    put.barriers.push_back({0, 80.0, Direction::down, BarrierType::knock_in});
    std::vector<double> flat(m.dimension(), 95.0);
    EXPECT_EQ(evaluate_payoff(flat, put, m), 0.0);
    flat[1] = 80.0;
    EXPECT_NEAR(evaluate_payoff(flat, put, m), df * 25.0, 1e-13);
}

TEST(EvaluatePayoff, InOutParityIsExact) {
    const MarketSpec m = small_market();
    std::mt19937_64 rng(5);
    std::lognormal_distribution<double> price(std::log(100.0), 0.15);
    for (auto dir : {Direction::up, Direction::down}) {
        ContractSpec out = basket_contract(dir == Direction::up ? 110 : 92, 95);
        out.barriers[0].direction = dir;
        ContractSpec in = out;
        in.barriers[0].type = BarrierType::knock_in;
        ContractSpec none = out;
        none.barriers.clear();
        for (int rep = 0; rep < 2000; ++rep) {
            std::vector<double> p(m.dimension());
            for (double& v : p) v = price(rng);
            EXPECT_EQ(evaluate_payoff(p, out, m) + evaluate_payoff(p, in, m), evaluate_payoff(p, none, m));
        }
    }
}

TEST(Survival, Examples) {
    const MarketSpec m = one_asset(100, 0.3, 0.045, 1.0, 1);
    EXPECT_EQ(survival_probability(100.0, m, {0, 100.0, Direction::up, BarrierType::knock_out}, 0.25), 0.5);
    EXPECT_EQ(survival_probability(100.0, m, {0, 1e300, Direction::up, BarrierType::knock_out}, 0.25), 1.0);
    EXPECT_EQ(survival_probability(100.0, m, {0, 100.0, Direction::down, BarrierType::knock_out}, 0.25), 0.5);
}

TEST(Survival, MatchesOneStepSimulation) {
    const MarketSpec m = one_asset(100, 0.3, 0.05, 1.0, 130);
    const BarrierClause up{0, 110.0, Direction::up, BarrierType::knock_out};
    const double dt = 1.0 / 130.0;
    const double gamma = survival_probability(100.0, m, up);
    EXPECT_NEAR(gamma, norm_cdf((std::log(1.1) - 0.005 * dt) / (0.3 * std::sqrt(dt))), 1e-15);
    EXPECT_NEAR((std::log(1.1) - 0.005 * dt) / (0.3 * std::sqrt(dt)), 3.6209, 1e-4);
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    const int n = 1000000;
    int alive = 0;
    for (int i = 0; i < n; ++i) alive += 100.0 * std::exp(0.005 * dt + 0.3 * std::sqrt(dt) * g(rng)) < 110.0;
    const double p = static_cast<double>(alive) / n;
    EXPECT_LE(std::abs(p - gamma), 3.0 * std::sqrt(gamma * (1 - gamma) / n) + 1e-12);
}

TEST(Survival, Monotonicity) {
    const MarketSpec m = one_asset(100, 0.3, 0.05, 1.0, 12);
    double last = 0.0;
    for (double b = 101; b < 140; b += 3) {
        const double g = survival_probability(100.0, m, {0, b, Direction::up, BarrierType::knock_out});
        EXPECT_GT(g, last);
        last = g;
    }
    last = 1.0;
    for (double s = 80; s < 110; s += 3) {
        const double g = survival_probability(s, m, {0, 110, Direction::up, BarrierType::knock_out});
        EXPECT_LT(g, last);
        last = g;
    }
}

TEST(ContractSpec, Validation) {
    const MarketSpec m = small_market();
    ContractSpec c = basket_contract(110, 90, BarrierType::knock_in);
    EXPECT_NO_THROW(c.validate(m));
    c.barriers.push_back({1, 80, Direction::down, BarrierType::knock_out});
    EXPECT_THROW(c.validate(m), std::invalid_argument);
    ContractSpec d = basket_contract(110, 90);
    d.barriers[0].asset = 5;
    EXPECT_THROW(d.validate(m), std::invalid_argument);
    ContractSpec w = basket_contract(110, 90);
    w.weights = {1.0, 2.0};
    EXPECT_THROW(w.validate(m), std::invalid_argument);
}
