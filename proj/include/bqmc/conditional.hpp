#pragma once

#include "bqmc/contracts.hpp"
#include "bqmc/lt_transform.hpp"
#include "bqmc/market.hpp"

#include <Eigen/Dense>

#include <limits>
#include <span>
#include <vector>

namespace bqmc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Interval of the first normal coordinate z_1 (endpoints may be infinite).
struct ZInterval {
    double lo = -kInf;
    double hi = kInf;

    double mass() const;
};

/// Admissible range [Upsilon_d, Upsilon_u] of the first uniform coordinate for
/// knock-out clauses, kept alongside its z-space preimage.
struct BoundPair {
    double lower = 0.0;
    double upper = 1.0;
    double z_lower = -kInf;
    double z_upper = kInf;

    static BoundPair from_z(double z_lower, double z_upper);
    static BoundPair from_u(double lower, double upper);

    /// max(upper - lower, 0), evaluated in the accurate tail.
    double weight() const;
    ZInterval z_interval() const { return {z_lower, z_upper}; }
};

/// Up to two disjoint, sorted pieces of the z_1 line (knock-in regions).
struct IntervalUnion {
    std::vector<ZInterval> intervals;

    double measure() const;
    bool empty() const { return intervals.empty(); }
};

struct Rescaled {
    double u1_hat = 0.0;
    double z1_hat = 0.0;
    double weight = 0.0;
};

/// u1_hat = lower + (upper - lower) u1 and its normal quantile; weight 0 means
/// the region is empty and u1_hat/z1_hat are meaningless.
Rescaled rescale_u1(double u1, const BoundPair& region);
/// Measure-proportional map of u1 onto the concatenated pieces of the union.
Rescaled rescale_u1(double u1, const IntervalUnion& region);

/// Barrier rows of one contract under one transform: for every clause the
/// first-column coefficients a_{j,1} and thresholds b(t_j) on its asset's rows.
class BarrierGeometry {
public:
    BarrierGeometry(const Eigen::MatrixXd& A, const MarketSpec& spec, const ContractSpec& contract);

    /// Knock-out region given w_rest = sum_{k>=2} a_{i,k} z_k for all mn rows.
    BoundPair knockout(std::span<const double> w_rest) const;
    /// Knock-in region of the contract's single knock-in clause.
    IntervalUnion knockin(std::span<const double> w_rest) const;
    /// Whichever applies to the contract; knock-out bounds become a one-piece union.
    IntervalUnion region(std::span<const double> w_rest) const;

    bool knock_in() const noexcept { return knock_in_; }
    bool has_barriers() const noexcept { return !clauses_.empty(); }

private:
    struct ClauseRows {
        BarrierClause clause;
        std::vector<std::size_t> rows;
        std::vector<double> a1;
        std::vector<double> threshold;
    };
    std::vector<ClauseRows> clauses_;
    bool knock_in_ = false;
};

/// Normal vector z = Phi^{-1}(u) and w_rest = A_{.,2..mn} z_{2..mn}.
Eigen::VectorXd rest_brownian(const Eigen::MatrixXd& A, std::span<const double> u);

BoundPair knockout_bounds(const Eigen::MatrixXd& A, const ContractSpec& contract, const MarketSpec& spec,
                          std::span<const double> u_rest);
IntervalUnion knockin_region(const Eigen::MatrixXd& A, const ContractSpec& contract, const MarketSpec& spec,
                             std::span<const double> u_rest);

struct WeightedSample {
    double value = 0.0;
    double weight = 1.0;
};

/// Conditional (CS) and plain samples under a fixed LT-style transform. The two
/// share one arithmetic path, w = w_rest + a_{.,1} z_1, so a region equal to
/// the whole line reproduces the plain sample bit for bit.
class LtSampler {
public:
    LtSampler(const MarketSpec& spec, const ContractSpec& contract, const Eigen::MatrixXd& A);

    /// Plain QMC+LT sample from w_rest and the raw first coordinate.
    double plain(std::span<const double> w_rest, double u1, std::span<double> prices) const;
    /// Conditioned sample: weight times the payoff of the rescaled path.
    WeightedSample conditional(std::span<const double> w_rest, double u1, std::span<double> prices) const;
    /// Discounted payoff for an explicit z_1.
    double payoff_at(std::span<const double> w_rest, double z1, std::span<double> prices) const;

    const BarrierGeometry& geometry() const noexcept { return geometry_; }
    const MarketSpec& market() const noexcept { return spec_; }
    const ContractSpec& contract() const noexcept { return contract_; }
    const Eigen::MatrixXd& transform() const noexcept { return A_; }
    /// log S(0) + (r - sigma^2/2) t for every row.
    const Eigen::VectorXd& log_base() const noexcept { return log_base_; }

private:
    MarketSpec spec_;
    ContractSpec contract_;
    Eigen::MatrixXd A_;
    Eigen::VectorXd first_column_;
    Eigen::VectorXd log_base_;
    BarrierGeometry geometry_;
};

/// Single-point CS sample: w * e^{-rT} max(f(u1_hat, u_2..u_mn), 0).
WeightedSample cs_sample(std::span<const double> u, const Eigen::MatrixXd& A, const ContractSpec& contract,
                         const MarketSpec& spec);
/// Single-point unconditioned sample under the same transform.
double plain_sample(std::span<const double> u, const Eigen::MatrixXd& A, const ContractSpec& contract,
                    const MarketSpec& spec);

/// Incremental (per-step Cholesky) path construction with optional
/// Glasserman–Staum conditioning of the barrier asset. Coordinates are used
/// time-block by time-block, barrier asset first within each block.
class IncrementalSampler {
public:
    /// Throws CapabilityError when `conditional` and the contract has knock-in
    /// clauses or knock-out clauses on more than one asset.
    IncrementalSampler(const MarketSpec& spec, const ContractSpec& contract, bool conditional);

    struct Result {
        double value = 0.0;
        double likelihood = 1.0;
    };
    Result sample(std::span<const double> u, std::span<double> prices) const;

    bool conditional() const noexcept { return conditional_; }

private:
    MarketSpec spec_;
    ContractSpec contract_;
    bool conditional_;
    std::vector<std::size_t> order_;  // order_[k] = asset simulated k-th in each time block
    Eigen::MatrixXd corr_factor_;
    double up_level_ = kInf;
    double down_level_ = 0.0;
};

/// Glasserman–Staum sample L_m e^{-rT} max(f, 0).
IncrementalSampler::Result gs_sample(std::span<const double> u, const MarketSpec& spec,
                                     const ContractSpec& contract);

}  // namespace bqmc
