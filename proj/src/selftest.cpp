#include "bqmc/selftest.hpp"

#include "bqmc/conditional.hpp"
#include "bqmc/contracts.hpp"
#include "bqmc/experiments.hpp"
#include "bqmc/lt_transform.hpp"
#include "bqmc/market.hpp"
#include "bqmc/normal.hpp"
#include "bqmc/qmc.hpp"
#include "bqmc/root_finder.hpp"

#include <cmath>
#include <exception>
#include <functional>
#include <ostream>
#include <string>

namespace bqmc {

namespace {

MarketSpec small_market() {
    MarketSpec m;
    m.s0 = {100.0, 95.0};
    m.sigma = {0.25, 0.35};
    m.rho = uniform_correlation(2, 0.4);
    m.rate = 0.05;
    m.maturity = 0.5;
    m.steps = 3;
    return m;
}

ContractSpec small_contract() {
    ContractSpec c;
    c.family = PayoffFamily::asian_basket_call;
    c.strike = 90.0;
    c.barriers.push_back({0, 115.0, Direction::up, BarrierType::knock_out});
    return c;
}

}  // namespace

int run_selftest(std::ostream& out) {
    int failures = 0;
    auto check = [&](const std::string& name, const std::function<bool()>& body) {
        bool ok = false;
        std::string detail;
        try {
            ok = body();
        } catch (const std::exception& e) {
            detail = std::string(" (") + e.what() + ")";
        }
        out << (ok ? "PASS " : "FAIL ") << name << detail << '\n';
        if (!ok) ++failures;
    };

    check("sobol first points", [] {
        const PointMatrix p = generate_points({PointKind::sobol, 2, 3, 0, false});
        return p(0, 0) == 0.5 && p(0, 1) == 0.5 && p(1, 0) == 0.75 && p(1, 1) == 0.25 && p(2, 0) == 0.25 &&
               p(2, 1) == 0.75;
    });
    check("digital shift involution", [] {
        const PointMatrix p = generate_points({PointKind::sobol, 5, 64, 0, true});
        const Randomization r{RandomizationKind::digital_shift, replication_shifts(1, 5, 7).front()};
        return randomize(randomize(p, r), r) == p;
    });
    check("covariance block pattern", [] {
        MarketSpec m;
        m.s0 = {1.0};
        m.sigma = {1.0};
        m.rho = Eigen::MatrixXd::Ones(1, 1);
        m.maturity = 2.0;
        m.steps = 2;
        const Eigen::MatrixXd s = build_covariance(m);
        return s(0, 0) == 1.0 && s(0, 1) == 1.0 && s(1, 0) == 1.0 && s(1, 1) == 2.0;
    });
    check("LT transform reproduces covariance", [] {
        const MarketSpec m = small_market();
        const PathTransform t = make_lt_transform(m, small_contract());
        const Eigen::MatrixXd s = build_covariance(m);
        const double err = (t.A * t.A.transpose() - s).norm() / s.norm();
        const Eigen::MatrixXd q = *t.Q;
        const double orth = (q.transpose() * q - Eigen::MatrixXd::Identity(q.rows(), q.cols())).cwiseAbs().maxCoeff();
        return err < 1e-9 && orth < 1e-9;
    });
    check("knock-out bound hand case", [] {
        MarketSpec m;
        m.s0 = {1.0};
        m.sigma = {1.0};
        m.rho = Eigen::MatrixXd::Ones(1, 1);
        m.rate = 0.5;
        m.maturity = 2.0;
        m.steps = 2;
        ContractSpec c;
        c.family = PayoffFamily::binary;
        c.barriers.push_back({0, std::exp(0.5), Direction::up, BarrierType::knock_out});
        Eigen::MatrixXd a(2, 2);
        a << 1.0, 0.0, 1.0, 1.0;
        const double u_rest[] = {0.5};
        const BoundPair b = knockout_bounds(a, c, m, u_rest);
        return std::abs(b.upper - norm_cdf(0.5)) < 1e-15 && b.lower == 0.0;
    });
    check("knock-in and knock-out measures complement", [] {
        const MarketSpec m = small_market();
        ContractSpec out_c = small_contract();
        ContractSpec in_c = out_c;
        in_c.barriers[0].type = BarrierType::knock_in;
        const PathTransform t = make_lt_transform(m, out_c);
        const std::vector<double> u_rest(m.dimension() - 1, 0.37);
        const double w = knockout_bounds(t.A, out_c, m, u_rest).weight() +
                         knockin_region(t.A, in_c, m, u_rest).measure();
        return std::abs(w - 1.0) < 1e-12;
    });
    check("root of e^z + e^-z - 3", [] {
        const double c[] = {1.0, 1.0};
        const double a[] = {1.0, -1.0};
        const PositivityRegion r = find_positivity_region(Z1Profile::from_coefficients(c, a, 3.0));
        const double expect = std::log((3.0 + std::sqrt(5.0)) / 2.0);
        return r.roots.size() == 2 && std::abs(r.roots[0] + expect) < 1e-10 && std::abs(r.roots[1] - expect) < 1e-10;
    });
    check("lognormal mean by analytic integration", [] {
        const double c[] = {1.0};
        const double a[] = {1.0};
        return std::abs(analytic_z1_expectation(Z1Profile::from_coefficients(c, a, 0.0), {}) - std::exp(0.5)) < 1e-14;
    });
    check("down-and-in put at B = S0 equals vanilla put", [] {
        return std::abs(analytic_down_in_put(100.0, 110.0, 100.0, 0.2, 0.05, 1.0) -
                        black_scholes_put(100.0, 110.0, 0.2, 0.05, 1.0)) < 1e-10;
    });
    check("in-out parity", [] {
        const MarketSpec m = small_market();
        ContractSpec out_c = small_contract();
        ContractSpec in_c = out_c;
        in_c.barriers[0].type = BarrierType::knock_in;
        ContractSpec none = out_c;
        none.barriers.clear();
        const PathTransform t = make_lt_transform(m, out_c);
        const PointMatrix u = generate_points({PointKind::pseudo_random, m.dimension(), 256, 3, false});
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            Eigen::VectorXd z(u.cols());
            for (Eigen::Index k = 0; k < u.cols(); ++k) z[k] = norm_inv(u(i, k));
            const Eigen::MatrixXd p = asset_paths(m, t.A, {z.data(), static_cast<std::size_t>(z.size())});
            if (evaluate_payoff(p, out_c, m) + evaluate_payoff(p, in_c, m) != evaluate_payoff(p, none, m)) return false;
        }
        return true;
    });
    return failures;
}

}  // namespace bqmc
