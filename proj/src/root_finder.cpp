#include "bqmc/root_finder.hpp"

#include "bqmc/errors.hpp"
#include "bqmc/normal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace bqmc {

Z1Profile Z1Profile::from_coefficients(std::span<const double> c, std::span<const double> a, double strike,
                                       double scale) {
    if (c.size() != a.size()) throw std::invalid_argument("profile coefficient sizes differ");
    Z1Profile p;
    p.strike = strike;
    p.scale = scale;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!(c[i] >= 0.0)) throw std::invalid_argument("profile coefficients must be non-negative");
        p.log_c.push_back(std::log(c[i]));
        p.a.push_back(a[i]);
    }
    return p;
}

std::array<double, 4> evaluate_profile(const Z1Profile& p, double z, int first_order) {
    double shift = -kInf;
    for (std::size_t i = 0; i < p.a.size(); ++i) shift = std::max(shift, p.log_c[i] + p.a[i] * z);
    std::array<double, 4> out{0.0, 0.0, 0.0, 0.0};
    if (shift > -kInf) {
        for (std::size_t i = 0; i < p.a.size(); ++i) {
            const double a = p.a[i];
            double term = std::exp(p.log_c[i] + a * z - shift);
            for (int k = 0; k < first_order; ++k) term *= a;
            out[0] += term;
            term *= a;
            out[1] += term;
            term *= a;
            out[2] += term;
            term *= a;
            out[3] += term;
        }
        const double factor = p.scale * std::exp(shift);
        for (double& v : out) v *= factor;
    }
    if (first_order == 0) out[0] -= p.strike;
    return out;
}

double profile_derivative(const Z1Profile& p, double z, int order) {
    if (order < 0) throw std::invalid_argument("derivative order must be non-negative");
    return evaluate_profile(p, z, order)[0];
}

namespace {

double value_at(const Z1Profile& p, double z) { return evaluate_profile(p, z, 0)[0]; }

// Points (neg, pos) with f(neg) <= 0 < f(pos) and f monotone in between,
// tightened by doubling steps from the point nearest the origin.
std::pair<double, double> tighten_bracket(const Z1Profile& p, double neg, double pos) {
    const double dir = pos > neg ? 1.0 : -1.0;
    const double start = std::clamp(0.0, std::min(neg, pos), std::max(neg, pos));
    if (start == neg || start == pos) {
        double lo = neg;
        for (double step = 1.0;; step *= 2.0) {
            const double x = dir > 0 ? std::min(lo + step, pos) : std::max(lo - step, pos);
            if (x == pos || value_at(p, x) > 0.0) return {lo, x};
            lo = x;
        }
    }
    if (value_at(p, start) > 0.0) {
        double hi = start;
        for (double step = 1.0;; step *= 2.0) {
            const double x = dir > 0 ? std::max(start - step, neg) : std::min(start + step, neg);
            if (x == neg || !(value_at(p, x) > 0.0)) return {x, hi};
            hi = x;
        }
    }
    double lo = start;
    for (double step = 1.0;; step *= 2.0) {
        const double x = dir > 0 ? std::min(start + step, pos) : std::max(start - step, pos);
        if (x == pos || value_at(p, x) > 0.0) return {lo, x};
        lo = x;
    }
}

RootResult solve_between(const Z1Profile& p, double neg, double pos) {
    const auto [a, b] = tighten_bracket(p, neg, pos);
    const double tol = 1e-11 * (1.0 + std::abs(p.strike));
    return safeguarded_root([&](double x) { return evaluate_profile(p, x, 0); }, std::min(a, b), std::max(a, b), tol);
}

IntervalUnion complement(const IntervalUnion& u) {
    IntervalUnion out;
    double cursor = -kInf;
    for (const auto& piece : u.intervals) {
        if (piece.lo > cursor) out.intervals.push_back({cursor, piece.lo});
        cursor = piece.hi;
    }
    if (cursor < kInf) out.intervals.push_back({cursor, kInf});
    return out;
}

IntervalUnion intersect(const IntervalUnion& x, const IntervalUnion& y) {
    IntervalUnion out;
    for (const auto& a : x.intervals)
        for (const auto& b : y.intervals) {
            const double lo = std::max(a.lo, b.lo);
            const double hi = std::min(a.hi, b.hi);
            if (hi > lo) out.intervals.push_back({lo, hi});
        }
    std::sort(out.intervals.begin(), out.intervals.end(),
              [](const ZInterval& l, const ZInterval& r) { return l.lo < r.lo; });
    return out;
}

}  // namespace

PositivityRegion find_positivity_region(const Z1Profile& p) {
    PositivityRegion out;
    bool rising = false;
    bool falling = false;
    for (std::size_t i = 0; i < p.a.size(); ++i) {
        if (p.log_c[i] == -kInf) continue;
        rising |= p.a[i] > 0.0;
        falling |= p.a[i] < 0.0;
    }

    const double w = kRootWindow;
    if (!rising && !falling) {
        if (value_at(p, 0.0) > 0.0) out.region.intervals.push_back({});
    } else {
        double z_star;
        if (!falling) {
            z_star = -w;
        } else if (!rising) {
            z_star = w;
        } else if (profile_derivative(p, -w, 1) >= 0.0) {
            z_star = -w;
        } else if (profile_derivative(p, w, 1) <= 0.0) {
            z_star = w;
        } else {
            const RootResult r = safeguarded_root([&](double x) { return evaluate_profile(p, x, 1); }, -w, w, 0.0);
            z_star = r.root;
            out.high_order_steps += r.high_order_steps;
        }

        if (value_at(p, z_star) >= 0.0) {
            out.region.intervals.push_back({});
        } else {
            if (z_star > -w && value_at(p, -w) > 0.0) {
                const RootResult r = solve_between(p, z_star, -w);
                out.roots.push_back(r.root);
                out.high_order_steps += r.high_order_steps;
                out.region.intervals.push_back({-kInf, r.root});
            }
            if (z_star < w && value_at(p, w) > 0.0) {
                const RootResult r = solve_between(p, z_star, w);
                out.roots.push_back(r.root);
                out.high_order_steps += r.high_order_steps;
                out.region.intervals.push_back({r.root, kInf});
            }
        }
    }
    if (p.orientation < 0) out.region = complement(out.region);
    return out;
}

double analytic_z1_expectation(const Z1Profile& p, const ZBounds& zb) {
    const double lo = zb.xi_lower;
    const double hi = zb.xi_upper;
    if (!(hi > lo)) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < p.a.size(); ++i) {
        if (p.log_c[i] == -kInf) continue;
        const double a = p.a[i];
        const double mass = normal_mass(lo - a, hi - a);
        if (mass > 0.0) sum += std::exp(p.log_c[i] + 0.5 * a * a) * mass;
    }
    const double value = p.scale * sum - p.strike * normal_mass(lo, hi);
    return p.orientation < 0 ? -value : value;
}

RfSampler::RfSampler(const MarketSpec& spec, const ContractSpec& contract, const Eigen::MatrixXd& A)
    : spec_(spec), contract_(contract), geometry_(A, spec, contract) {
    const std::size_t d = spec.dimension();
    if (static_cast<std::size_t>(A.rows()) != d) throw std::invalid_argument("transform does not match market dimension");
    if (contract.family == PayoffFamily::asian_basket_call) {
        const std::vector<double> weights = contract.resolved_weights(spec);
        for (std::size_t i = 0; i < d; ++i) {
            if (weights[i] <= 0.0) continue;
            rows_.push_back(i);
            log_weight_.push_back(std::log(weights[i]));
        }
    } else if (contract.family == PayoffFamily::vanilla_put) {
        rows_.push_back(spec.row(contract.put_asset, spec.steps - 1));
        log_weight_.push_back(0.0);
    } else {
        throw CapabilityError("QMC_LT_CS_RF needs an exponential-sum payoff (asian_basket_call or vanilla_put); "
                              "binary families have no root in the first coordinate");
    }
    for (std::size_t row : rows_) a_.push_back(A(static_cast<Eigen::Index>(row), 0));
    log_base_.resize(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i)
        log_base_[static_cast<Eigen::Index>(i)] = std::log(spec.s0[i / spec.steps]) + spec.log_drift(i);
    discount_ = std::exp(-spec.rate * spec.maturity);
}

Z1Profile RfSampler::profile(std::span<const double> w_rest) const {
    Z1Profile p;
    p.strike = contract_.strike;
    p.orientation = contract_.family == PayoffFamily::vanilla_put ? -1 : 1;
    p.a = a_;
    p.log_c.resize(rows_.size());
    for (std::size_t k = 0; k < rows_.size(); ++k)
        p.log_c[k] = log_weight_[k] + log_base_[static_cast<Eigen::Index>(rows_[k])] + w_rest[rows_[k]];
    return p;
}

RfResult RfSampler::sample(std::span<const double> w_rest) const {
    RfResult out;
    IntervalUnion barrier;
    if (geometry_.has_barriers()) barrier = geometry_.region(w_rest);
    else barrier.intervals.push_back({});
    out.barrier_weight = barrier.measure();
    if (barrier.empty() || !(out.barrier_weight > 0.0)) {
        out.barrier_weight = 0.0;
        return out;
    }
    const Z1Profile p = profile(w_rest);
    const PositivityRegion positive = find_positivity_region(p);
    out.roots = positive.roots.size();
    out.high_order_steps = positive.high_order_steps;
    double total = 0.0;
    for (const auto& piece : intersect(barrier, positive.region).intervals)
        total += analytic_z1_expectation(p, {piece.lo, piece.hi});
    out.value = discount_ * std::max(total, 0.0);
    return out;
}

RfResult rf_sample(std::span<const double> u, const Eigen::MatrixXd& A, const ContractSpec& contract,
                   const MarketSpec& spec) {
    const RfSampler sampler(spec, contract, A);
    const Eigen::VectorXd w = rest_brownian(A, u);
    return sampler.sample({w.data(), static_cast<std::size_t>(w.size())});
}

}  // namespace bqmc
