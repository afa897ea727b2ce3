#include "bqmc/lt_transform.hpp"
#include "bqmc/market.hpp"
#include "lt_oracle.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace bqmc;
using namespace testing_support;

namespace {

double orthogonality_error(const Eigen::MatrixXd& q) {
    return (q.transpose() * q - Eigen::MatrixXd::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

LinearizedPayoff mu_of(std::initializer_list<double> values) {
    LinearizedPayoff lin;
    lin.mu = Eigen::VectorXd::Map(values.begin(), static_cast<Eigen::Index>(values.size()));
    return lin;
}

}  // namespace

TEST(Linearize, AsianBasketMu) {
    const MarketSpec m = small_market();
    ContractSpec c;
    c.family = PayoffFamily::asian_basket_call;
    c.strike = 100;
    const LinearizedPayoff lin = linearize(m, c);
    for (std::size_t i = 0; i < m.dimension(); ++i) {
        const std::size_t a = i / m.steps;
        const double t = m.time(i % m.steps);
        EXPECT_NEAR(lin.mu[static_cast<Eigen::Index>(i)],
                    std::log(m.s0[a] / 8.0) + (m.rate - 0.5 * m.sigma[a] * m.sigma[a]) * t, 1e-14);
    }
}

TEST(Gradient, Examples) {
    const Eigen::MatrixXd empty(1, 0);
    EXPECT_NEAR(lt_gradient_vector((Eigen::MatrixXd(1, 1) << 0.7).finished(), empty, mu_of({0.0}))[0], 0.7, 1e-16);
    const Eigen::MatrixXd c = (Eigen::MatrixXd(2, 2) << 1, 0, 1, 1).finished();
    const Eigen::VectorXd v = lt_gradient_vector(c, Eigen::MatrixXd(2, 0), mu_of({0.0, 0.0}));
    EXPECT_EQ(v, Eigen::Vector2d(2, 1));
}

TEST(Gradient, FirstColumnProportionalToWeightedRows) {
    const Eigen::MatrixXd c = (Eigen::MatrixXd(3, 3) << 1, 0, 0, 0.5, 2, 0, -0.3, 0.1, 1.5).finished();
    const LinearizedPayoff lin = mu_of({0.1, -0.4, 0.3});
    Eigen::VectorXd expect = Eigen::VectorXd::Zero(3);
    for (int i = 0; i < 3; ++i) expect += std::exp(lin.mu[i]) * c.row(i).transpose();
    const Eigen::VectorXd v = lt_gradient_vector(c, Eigen::MatrixXd(3, 0), lin);
    EXPECT_LT((v.normalized() - expect.normalized()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(NextColumn, Examples) {
    const Eigen::VectorXd a = next_lt_column(Eigen::Vector2d(3, 4), Eigen::MatrixXd(2, 0));
    EXPECT_NEAR(std::abs(a[0]), 0.6, 1e-15);
    EXPECT_NEAR(std::abs(a[1]), 0.8, 1e-15);
    const Eigen::VectorXd b = next_lt_column(Eigen::Vector2d(5, 2), Eigen::Vector2d(1, 0));
    EXPECT_NEAR(b[0], 0.0, 1e-15);
    EXPECT_NEAR(std::abs(b[1]), 1.0, 1e-15);
}

TEST(NextColumn, OrthogonalUnitAndOptimal) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int rep = 0; rep < 10; ++rep) {
        Eigen::MatrixXd basis = Eigen::MatrixXd::NullaryExpr(3, 2, [&] { return g(rng); });
        basis = Eigen::HouseholderQR<Eigen::MatrixXd>(basis).householderQ() * Eigen::MatrixXd::Identity(3, 2);
        const Eigen::VectorXd v = Eigen::VectorXd::NullaryExpr(3, [&] { return g(rng); });
        const Eigen::VectorXd q = next_lt_column(v, basis);
        EXPECT_NEAR(q.norm(), 1.0, 1e-12);
        EXPECT_LT(std::abs(q.dot(basis.col(0))), 1e-12);
        EXPECT_LT(std::abs(q.dot(basis.col(1))), 1e-12);
    }
    for (int rep = 0; rep < 5; ++rep) {
        Eigen::MatrixXd basis = Eigen::MatrixXd::NullaryExpr(3, 1, [&] { return g(rng); });
        basis.normalize();
        const Eigen::VectorXd v = Eigen::VectorXd::NullaryExpr(3, [&] { return g(rng); });
        const Eigen::VectorXd q = next_lt_column(v, basis);
        EXPECT_NEAR(std::pow(v.dot(q), 2), brute_force_lt_objective(v, basis, 10 + rep), 1e-6);
    }
}

TEST(NextColumn, DegenerateVectorFallsBackToComplement) {
    const Eigen::MatrixXd basis = Eigen::Vector3d(1, 0, 0);
    const Eigen::VectorXd q = next_lt_column(Eigen::Vector3d(2, 0, 0), basis);
    EXPECT_NEAR(q.norm(), 1.0, 1e-15);
    EXPECT_NEAR(q[0], 0.0, 1e-15);
}

TEST(BuildLt, ToySpecObjectivesMatchBruteForce) {
    MarketSpec m;
    m.s0 = {100.0, 90.0, 110.0};
    m.sigma = {0.3, 0.2, 0.4};
    m.rho = uniform_correlation(3, 0.3);
    m.rate = 0.03;
    m.maturity = 1.0;
    m.steps = 1;
    ContractSpec c;
    c.family = PayoffFamily::asian_basket_call;
    c.strike = 100;
    const Eigen::MatrixXd chol = cholesky(build_covariance(m)).lower;
    const LinearizedPayoff lin = linearize(m, c);
    const Eigen::MatrixXd q = build_lt_matrix(chol, lin);
    EXPECT_LT(orthogonality_error(q), 1e-12);
    for (Eigen::Index k = 0; k < 3; ++k) {
        const Eigen::VectorXd v = lt_gradient_vector(chol, q.leftCols(k), lin);
        EXPECT_NEAR(std::pow(v.dot(q.col(k)), 2), brute_force_lt_objective(v, q.leftCols(k), 100 + k), 1e-6);
    }
}

TEST(BuildLt, SingleAssetFirstColumnClosedForm) {
    MarketSpec m;
    m.s0 = {100.0};
    m.sigma = {0.3};
    m.rho = Eigen::MatrixXd::Ones(1, 1);
    m.rate = 0.05;
    m.maturity = 1.0;
    m.steps = 12;
    ContractSpec c;
    c.family = PayoffFamily::asian_basket_call;
    c.strike = 100;
    const Eigen::MatrixXd chol = cholesky(build_covariance(m)).lower;
    const LinearizedPayoff lin = linearize(m, c);
    const Eigen::MatrixXd q = build_lt_matrix(chol, lin);
    Eigen::VectorXd ref = Eigen::VectorXd::Zero(12);
    for (Eigen::Index i = 0; i < 12; ++i) ref += std::exp(lin.mu[i]) * chol.row(i).transpose();
    ref.normalize();
    EXPECT_LT(std::min((q.col(0) - ref).cwiseAbs().maxCoeff(), (q.col(0) + ref).cwiseAbs().maxCoeff()), 1e-12);
}

TEST(BuildLt, BasketConfigsReproduceCovariance) {
    for (bool p2 : {false, true})
        for (double s1 : {0.25, 0.55}) {
            const MarketSpec m = basket_market(p2, s1);
            const PathTransform t = make_lt_transform(m, basket_contract(125, 70));
            const Eigen::MatrixXd s = build_covariance(m);
            EXPECT_LT((t.A * t.A.transpose() - s).norm() / s.norm(), 1e-9);
            EXPECT_LT(orthogonality_error(*t.Q), 1e-9);
            EXPECT_EQ(t.kind, TransformKind::cholesky_lt);
        }
}

TEST(SignFix, PositiveBarrierRowsAndInvolution) {
    const MarketSpec m = small_market();
    const ContractSpec c = basket_contract(120, 90);
    const Eigen::MatrixXd chol = cholesky(build_covariance(m)).lower;
    const auto rows = barrier_rows(m, c);
    const Eigen::MatrixXd q = fix_first_column_sign(build_lt_matrix(chol, linearize(m, c)), chol, rows);
    double total = 0.0;
    for (std::size_t r : rows) total += (chol * q)(static_cast<Eigen::Index>(r), 0);
    EXPECT_GT(total, 0.0);
    EXPECT_EQ(fix_first_column_sign(q, chol, rows), q);
    Eigen::MatrixXd neg = q;
    neg.col(0) = -neg.col(0);
    EXPECT_EQ(fix_first_column_sign(neg, chol, rows), q);
    EXPECT_EQ(fix_first_column_sign(neg, chol, rows).rightCols(q.cols() - 1), q.rightCols(q.cols() - 1));
}

TEST(SignFix, MixedSignSpecHasOppositeSigns) {
    const MarketSpec m = mixed_sign_market(-0.72);
    const PathTransform t = make_lt_transform(m, mixed_sign_contract());
    EXPECT_LT(t.A(0, 0) * t.A(1, 0), 0.0);
}

TEST(Linearize, PutUsesTerminalPrice) {
    MarketSpec m = small_market();
    ContractSpec c;
    c.family = PayoffFamily::vanilla_put;
    c.strike = 100;
    c.put_asset = 1;
    const LinearizedPayoff lin = linearize(m, c);
    for (std::size_t i = 0; i < m.dimension(); ++i)
        EXPECT_EQ(std::isfinite(lin.mu[static_cast<Eigen::Index>(i)]), i == m.row(1, m.steps - 1));
}
