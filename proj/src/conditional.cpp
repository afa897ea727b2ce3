#include "bqmc/conditional.hpp"

#include "bqmc/errors.hpp"
#include "bqmc/normal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bqmc {

double ZInterval::mass() const { return normal_mass(lo, hi); }

BoundPair BoundPair::from_z(double z_lower, double z_upper) {
    BoundPair b;
    b.z_lower = z_lower;
    b.z_upper = z_upper;
    b.lower = norm_cdf(z_lower);
    b.upper = norm_cdf(z_upper);
    return b;
}

BoundPair BoundPair::from_u(double lower, double upper) {
    BoundPair b;
    b.lower = lower;
    b.upper = upper;
    b.z_lower = lower <= 0.0 ? -kInf : norm_inv(lower);
    b.z_upper = upper >= 1.0 ? kInf : norm_inv(upper);
    return b;
}

double BoundPair::weight() const { return normal_mass(z_lower, z_upper); }

double IntervalUnion::measure() const {
    double total = 0.0;
    for (const auto& piece : intervals) total += piece.mass();
    return total;
}

Rescaled rescale_u1(double u1, const BoundPair& region) {
    Rescaled r;
    r.weight = region.weight();
    if (!(r.weight > 0.0)) {
        r.weight = 0.0;
        return r;
    }
    r.u1_hat = region.lower + (region.upper - region.lower) * u1;
    r.z1_hat = truncated_normal_quantile(region.z_lower, region.z_upper, u1);
    return r;
}

Rescaled rescale_u1(double u1, const IntervalUnion& region) {
    Rescaled r;
    r.weight = region.measure();
    if (!(r.weight > 0.0)) {
        r.weight = 0.0;
        return r;
    }
    const double target = u1 * r.weight;
    double consumed = 0.0;
    for (std::size_t k = 0; k < region.intervals.size(); ++k) {
        const ZInterval& piece = region.intervals[k];
        const double mass = piece.mass();
        const bool last = k + 1 == region.intervals.size();
        if (target < consumed + mass || last) {
            if (!(mass > 0.0)) continue;
            const double t = std::min((target - consumed) / mass, 1.0);
            r.u1_hat = norm_cdf(piece.lo) + (target - consumed);
            r.z1_hat = region.intervals.size() == 1 ? truncated_normal_quantile(piece.lo, piece.hi, u1)
                                                    : truncated_normal_quantile(piece.lo, piece.hi, t);
            return r;
        }
        consumed += mass;
    }
    r.weight = 0.0;
    return r;
}

BarrierGeometry::BarrierGeometry(const Eigen::MatrixXd& A, const MarketSpec& spec, const ContractSpec& contract) {
    contract.validate(spec);
    knock_in_ = contract.knock_in();
    for (const auto& clause : contract.barriers) {
        ClauseRows rows;
        rows.clause = clause;
        for (std::size_t j = 0; j < spec.steps; ++j) {
            const std::size_t row = spec.row(clause.asset, j);
            rows.rows.push_back(row);
            rows.a1.push_back(A(static_cast<Eigen::Index>(row), 0));
            rows.threshold.push_back(barrier_threshold(spec, clause, j));
        }
        clauses_.push_back(std::move(rows));
    }
}

BoundPair BarrierGeometry::knockout(std::span<const double> w_rest) const {
    double lower = -kInf;
    double upper = kInf;
    bool feasible = true;
    for (const auto& c : clauses_) {
        const bool up = c.clause.direction == Direction::up;
        for (std::size_t j = 0; j < c.rows.size(); ++j) {
            const double a = c.a1[j];
            const double slack = c.threshold[j] - w_rest[c.rows[j]];
            if (a == 0.0) {
                // survival decided by the fixed part alone
                if (up ? !(slack > 0.0) : !(slack < 0.0)) feasible = false;
                continue;
            }
            const double r = slack / a;
            // up: a z < slack; down: a z > slack
            if ((a > 0.0) == up) upper = std::min(upper, r);
            else lower = std::max(lower, r);
        }
    }
    if (!feasible) return BoundPair::from_z(0.0, 0.0);
    return BoundPair::from_z(lower, upper);
}

IntervalUnion BarrierGeometry::knockin(std::span<const double> w_rest) const {
    IntervalUnion region;
    if (clauses_.empty()) {
        region.intervals.push_back({});
        return region;
    }
    const ClauseRows& c = clauses_.front();
    const bool up = c.clause.direction == Direction::up;
    double left = -kInf;   // crossing guaranteed for z <= left
    double right = kInf;   // crossing guaranteed for z >= right
    bool always = false;
    for (std::size_t j = 0; j < c.rows.size(); ++j) {
        const double a = c.a1[j];
        const double slack = c.threshold[j] - w_rest[c.rows[j]];
        if (a == 0.0) {
            if (up ? !(slack > 0.0) : !(slack < 0.0)) always = true;
            continue;
        }
        const double r = slack / a;
        // up: crossing iff a z >= slack; down: crossing iff a z <= slack
        if ((a > 0.0) == up) right = std::min(right, r);
        else left = std::max(left, r);
    }
    if (always || left >= right) {
        region.intervals.push_back({});
        return region;
    }
    if (left > -kInf) region.intervals.push_back({-kInf, left});
    if (right < kInf) region.intervals.push_back({right, kInf});
    return region;
}

IntervalUnion BarrierGeometry::region(std::span<const double> w_rest) const {
    if (knock_in_) return knockin(w_rest);
    IntervalUnion u;
    const BoundPair b = knockout(w_rest);
    if (b.z_upper > b.z_lower) u.intervals.push_back(b.z_interval());
    return u;
}

Eigen::VectorXd rest_brownian(const Eigen::MatrixXd& A, std::span<const double> u) {
    const Eigen::Index d = A.rows();
    if (static_cast<Eigen::Index>(u.size()) != d) throw std::invalid_argument("point dimension does not match transform");
    Eigen::VectorXd z(d - 1);
    for (Eigen::Index k = 1; k < d; ++k) z[k - 1] = norm_inv(u[static_cast<std::size_t>(k)]);
    if (d == 1) return Eigen::VectorXd::Zero(1);
    return A.rightCols(d - 1) * z;
}

namespace {

std::vector<double> with_placeholder(std::span<const double> u_rest) {
    std::vector<double> u(u_rest.size() + 1, 0.5);
    std::copy(u_rest.begin(), u_rest.end(), u.begin() + 1);
    return u;
}

}  // namespace

BoundPair knockout_bounds(const Eigen::MatrixXd& A, const ContractSpec& contract, const MarketSpec& spec,
                          std::span<const double> u_rest) {
    const BarrierGeometry geometry(A, spec, contract);
    const Eigen::VectorXd w = rest_brownian(A, with_placeholder(u_rest));
    return geometry.knockout({w.data(), static_cast<std::size_t>(w.size())});
}

IntervalUnion knockin_region(const Eigen::MatrixXd& A, const ContractSpec& contract, const MarketSpec& spec,
                             std::span<const double> u_rest) {
    const BarrierGeometry geometry(A, spec, contract);
    const Eigen::VectorXd w = rest_brownian(A, with_placeholder(u_rest));
    return geometry.knockin({w.data(), static_cast<std::size_t>(w.size())});
}

LtSampler::LtSampler(const MarketSpec& spec, const ContractSpec& contract, const Eigen::MatrixXd& A)
    : spec_(spec), contract_(contract), A_(A), geometry_(A, spec, contract) {
    const auto d = static_cast<Eigen::Index>(spec.dimension());
    if (A.rows() != d || A.cols() != d) throw std::invalid_argument("transform does not match market dimension");
    first_column_ = A.col(0);
    log_base_.resize(d);
    for (Eigen::Index i = 0; i < d; ++i)
        log_base_[i] = std::log(spec.s0[static_cast<std::size_t>(i) / spec.steps]) +
                       spec.log_drift(static_cast<std::size_t>(i));
}

double LtSampler::payoff_at(std::span<const double> w_rest, double z1, std::span<double> prices) const {
    const std::size_t d = prices.size();
    for (std::size_t i = 0; i < d; ++i)
        prices[i] = std::exp(log_base_[static_cast<Eigen::Index>(i)] +
                             (w_rest[i] + first_column_[static_cast<Eigen::Index>(i)] * z1));
    return evaluate_payoff(prices, contract_, spec_);
}

double LtSampler::plain(std::span<const double> w_rest, double u1, std::span<double> prices) const {
    return payoff_at(w_rest, norm_inv(u1), prices);
}

WeightedSample LtSampler::conditional(std::span<const double> w_rest, double u1, std::span<double> prices) const {
    const Rescaled r = rescale_u1(u1, geometry_.region(w_rest));
    if (!(r.weight > 0.0)) return {0.0, 0.0};
    return {r.weight * payoff_at(w_rest, r.z1_hat, prices), r.weight};
}

WeightedSample cs_sample(std::span<const double> u, const Eigen::MatrixXd& A, const ContractSpec& contract,
                         const MarketSpec& spec) {
    const LtSampler sampler(spec, contract, A);
    const Eigen::VectorXd w = rest_brownian(A, u);
    std::vector<double> prices(spec.dimension());
    return sampler.conditional({w.data(), static_cast<std::size_t>(w.size())}, u[0], prices);
}

double plain_sample(std::span<const double> u, const Eigen::MatrixXd& A, const ContractSpec& contract,
                    const MarketSpec& spec) {
    const LtSampler sampler(spec, contract, A);
    const Eigen::VectorXd w = rest_brownian(A, u);
    std::vector<double> prices(spec.dimension());
    return sampler.plain({w.data(), static_cast<std::size_t>(w.size())}, u[0], prices);
}

IncrementalSampler::IncrementalSampler(const MarketSpec& spec, const ContractSpec& contract, bool conditional)
    : spec_(spec), contract_(contract), conditional_(conditional && !contract.barriers.empty()) {
    spec.validate();
    contract.validate(spec);
    const std::size_t n = spec.assets();
    std::size_t barrier_asset = 0;
    if (conditional_) {
        barrier_asset = contract.barriers.front().asset;
        for (const auto& clause : contract.barriers) {
            if (clause.type != BarrierType::knock_out)
                throw CapabilityError("MC_CS (incremental conditioning) needs a closed-form intermediate value for "
                                      "knock-in clauses and is not available for this contract");
            if (clause.asset != barrier_asset)
                throw CapabilityError("MC_CS conditions one asset per step; barriers on several assets are unsupported");
            if (clause.direction == Direction::up) up_level_ = std::min(up_level_, clause.level);
            else down_level_ = std::max(down_level_, clause.level);
        }
    }
    order_.push_back(barrier_asset);
    for (std::size_t a = 0; a < n; ++a)
        if (a != barrier_asset) order_.push_back(a);
    Eigen::MatrixXd corr(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) corr(i, k) = spec.rho(order_[i], order_[k]);
    corr_factor_ = cholesky(corr).lower;
}

IncrementalSampler::Result IncrementalSampler::sample(std::span<const double> u, std::span<double> prices) const {
    const std::size_t n = spec_.assets();
    const std::size_t m = spec_.steps;
    if (u.size() != n * m || prices.size() != n * m) throw std::invalid_argument("incremental sampler needs mn coordinates");

    double log_s[64];
    double z[64];
    std::vector<double> log_s_heap, z_heap;
    double* ls = log_s;
    double* zz = z;
    if (n > 64) {
        log_s_heap.resize(n);
        z_heap.resize(n);
        ls = log_s_heap.data();
        zz = z_heap.data();
    }
    for (std::size_t k = 0; k < n; ++k) ls[k] = std::log(spec_.s0[order_[k]]);

    const std::size_t b = order_[0];
    const double sb = spec_.sigma[b];
    const double log_up = std::log(up_level_);
    const double log_down = down_level_ > 0.0 ? std::log(down_level_) : -kInf;
    double likelihood = 1.0;

    for (std::size_t j = 0; j < m; ++j) {
        const double dt = spec_.step_length(j);
        const double sq = std::sqrt(dt);
        const double* uj = u.data() + j * n;
        if (conditional_) {
            const double drift = (spec_.rate - 0.5 * sb * sb) * dt;
            const double hi = (log_up - ls[0] - drift) / (sb * sq);
            const double lo = (log_down - ls[0] - drift) / (sb * sq);
            const double gamma = normal_mass(lo, hi);
            likelihood *= gamma;
            if (!(gamma > 0.0)) return {0.0, 0.0};
            zz[0] = truncated_normal_quantile(lo, hi, uj[0]);
        } else {
            zz[0] = norm_inv(uj[0]);
        }
        for (std::size_t k = 1; k < n; ++k) zz[k] = norm_inv(uj[k]);
        for (std::size_t k = 0; k < n; ++k) {
            double x = 0.0;
            for (std::size_t l = 0; l <= k; ++l) x += corr_factor_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) * zz[l];
            const double s = spec_.sigma[order_[k]];
            ls[k] += (spec_.rate - 0.5 * s * s) * dt + s * sq * x;
            prices[spec_.row(order_[k], j)] = std::exp(ls[k]);
        }
    }
    return {likelihood * evaluate_payoff(prices, contract_, spec_), likelihood};
}

IncrementalSampler::Result gs_sample(std::span<const double> u, const MarketSpec& spec, const ContractSpec& contract) {
    const IncrementalSampler sampler(spec, contract, true);
    std::vector<double> prices(spec.dimension());
    return sampler.sample(u, prices);
}

}  // namespace bqmc
