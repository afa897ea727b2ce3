#pragma once

#include "bqmc/conditional.hpp"
#include "bqmc/contracts.hpp"
#include "bqmc/market.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace bqmc {

/// f(z) = scale * sum_i exp(log_c[i] + a[i] z) - strike, as a function of the
/// first normal coordinate with all others fixed. The payoff integrand is
/// max(orientation * f, 0): +1 for calls, -1 for puts (K - S).
struct Z1Profile {
    std::vector<double> log_c;
    std::vector<double> a;
    double strike = 0.0;
    double scale = 1.0;
    int orientation = 1;

    static Z1Profile from_coefficients(std::span<const double> c, std::span<const double> a, double strike,
                                       double scale = 1.0);
};

/// Integration window [xi_lower, xi_upper] in z-space.
struct ZBounds {
    double xi_lower = -kInf;
    double xi_upper = kInf;
};

/// Window inside which roots are searched; beyond it Phi underflows.
inline constexpr double kRootWindow = 40.0;

/// Derivative of the given order (0 includes -strike), max-exponent stabilized.
double profile_derivative(const Z1Profile& p, double z, int order);
/// Derivatives first_order .. first_order + 3 from one pass over the rows.
std::array<double, 4> evaluate_profile(const Z1Profile& p, double z, int first_order = 0);

/// Region where orientation * f > 0, with the roots that delimit it.
struct PositivityRegion {
    IntervalUnion region;
    std::vector<double> roots;
    /// Householder steps spent over all root solves.
    int high_order_steps = 0;
};
PositivityRegion find_positivity_region(const Z1Profile& p);

struct RootResult {
    double root = 0.0;
    int high_order_steps = 0;
    int bisection_steps = 0;
};

/// Order-4 Householder iteration on [lo, hi] with bisection fallback. `fn(x)`
/// returns (g, g', g'', g''') at x; g(lo) and g(hi) must differ in sign.
template <class Fn>
RootResult safeguarded_root(Fn&& fn, double lo, double hi, double tolerance, int max_high_order = 10) {
    RootResult out;
    auto flo = fn(lo)[0];
    if (flo == 0.0) {
        out.root = lo;
        return out;
    }
    const bool rising = flo < 0.0;
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 400; ++iter) {
        const auto d = fn(x);
        if (std::abs(d[0]) <= tolerance || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(x))) {
            out.root = x;
            return out;
        }
        if ((d[0] < 0.0) == rising) lo = x;
        else hi = x;
        double next = std::numeric_limits<double>::quiet_NaN();
        if (out.high_order_steps < max_high_order) {
            const double f = d[0], f1 = d[1], f2 = d[2], f3 = d[3];
            const double num = f * (6.0 * f1 * f1 - 3.0 * f * f2);
            const double den = 6.0 * f1 * f1 * f1 - 6.0 * f * f1 * f2 + f * f * f3;
            if (den != 0.0) next = x - num / den;
        }
        if (std::isfinite(next) && next > lo && next < hi) {
            ++out.high_order_steps;
            if (std::abs(next - x) <= 2.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(x))) {
                out.root = next;
                return out;
            }
            x = next;
        } else {
            ++out.bisection_steps;
            x = 0.5 * (lo + hi);
        }
    }
    out.root = x;
    return out;
}

/// Integral of orientation * f times the normal density over the bounds.
double analytic_z1_expectation(const Z1Profile& p, const ZBounds& zb);

struct RfResult {
    double value = 0.0;
    /// Measure of the barrier region; 0 marks a wasted sample.
    double barrier_weight = 1.0;
    std::size_t roots = 0;
    int high_order_steps = 0;
};

/// Root-finding estimator under a fixed transform: the first coordinate is
/// integrated out over barrier region intersected with payoff positivity.
class RfSampler {
public:
    /// Throws CapabilityError for families without an exponential-sum profile.
    RfSampler(const MarketSpec& spec, const ContractSpec& contract, const Eigen::MatrixXd& A);

    Z1Profile profile(std::span<const double> w_rest) const;
    RfResult sample(std::span<const double> w_rest) const;

private:
    MarketSpec spec_;
    ContractSpec contract_;
    BarrierGeometry geometry_;
    std::vector<std::size_t> rows_;
    std::vector<double> log_weight_;
    std::vector<double> a_;
    Eigen::VectorXd log_base_;
    double discount_ = 1.0;
};

/// Single-point RF sample; u[0] is ignored.
RfResult rf_sample(std::span<const double> u, const Eigen::MatrixXd& A, const ContractSpec& contract,
                   const MarketSpec& spec);

}  // namespace bqmc
