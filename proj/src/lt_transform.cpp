#include "bqmc/lt_transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace bqmc {

LinearizedPayoff LinearizedPayoff::from_weights(const MarketSpec& spec, std::span<const double> weights) {
    const std::size_t d = spec.dimension();
    if (weights.size() != d) throw std::invalid_argument("linearization weights must have mn entries");
    LinearizedPayoff lin;
    lin.mu.resize(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
        const double w = weights[i];
        lin.mu[static_cast<Eigen::Index>(i)] =
            w > 0.0 ? std::log(w * spec.s0[i / spec.steps]) + spec.log_drift(i)
                    : -std::numeric_limits<double>::infinity();
    }
    return lin;
}

LinearizedPayoff linearize(const MarketSpec& spec, const ContractSpec& contract) {
    if (contract.family == PayoffFamily::vanilla_put) {
        std::vector<double> w(spec.dimension(), 0.0);
        w[spec.row(contract.put_asset, spec.steps - 1)] = 1.0;
        return LinearizedPayoff::from_weights(spec, w);
    }
    return LinearizedPayoff::from_weights(spec, contract.resolved_weights(spec));
}

namespace {

Eigen::VectorXd shifted_exponentials(const Eigen::VectorXd& exponents) {
    double top = -std::numeric_limits<double>::infinity();
    for (double e : exponents) top = std::max(top, e);
    if (!std::isfinite(top)) throw std::invalid_argument("linearized payoff has no positive weight");
    return (exponents.array() - top).exp().matrix();
}

void project_out(Eigen::VectorXd& v, const Eigen::MatrixXd& basis) {
    if (basis.cols() == 0) return;
    // classical Gram–Schmidt applied twice
    for (int pass = 0; pass < 2; ++pass) v.noalias() -= basis * (basis.transpose() * v);
}

}  // namespace

Eigen::VectorXd lt_gradient_vector(const Eigen::MatrixXd& C, const Eigen::MatrixXd& previous,
                                   const LinearizedPayoff& lin) {
    Eigen::VectorXd exponents = lin.mu;
    if (previous.cols() > 0) exponents += C * previous.rowwise().sum();
    return C.transpose() * shifted_exponentials(exponents);
}

namespace {

// Canonical vectors rejected once stay rejected as `previous` grows, so the
// scan resumes at `cursor`.
Eigen::VectorXd next_lt_column_from(const Eigen::VectorXd& v, const Eigen::MatrixXd& previous, Eigen::Index& cursor) {
    const Eigen::Index d = v.size();
    Eigen::VectorXd q = v;
    project_out(q, previous);
    const double norm = q.norm();
    if (norm > 1e-13 * v.norm() && norm > 0.0) return q / norm;

    // flat objective: any unit vector in the complement is optimal
    const double usable = 0.5 / std::sqrt(static_cast<double>(d));
    for (; cursor < d; ++cursor) {
        Eigen::VectorXd e = Eigen::VectorXd::Unit(d, cursor);
        project_out(e, previous);
        const double en = e.norm();
        if (en > usable) return e / en;
    }
    throw std::logic_error("no orthogonal complement left for LT column");
}

}  // namespace

Eigen::VectorXd next_lt_column(const Eigen::VectorXd& v, const Eigen::MatrixXd& previous) {
    Eigen::Index cursor = 0;
    return next_lt_column_from(v, previous, cursor);
}

Eigen::MatrixXd build_lt_matrix(const Eigen::MatrixXd& C, const LinearizedPayoff& lin) {
    const Eigen::Index d = C.rows();
    if (C.cols() != d || lin.mu.size() != d) throw std::invalid_argument("LT inputs must be mn-dimensional");
    Eigen::MatrixXd Q(d, d);
    Eigen::VectorXd column_sum = Eigen::VectorXd::Zero(d);
    Eigen::Index cursor = 0;
    for (Eigen::Index k = 0; k < d; ++k) {
        const Eigen::VectorXd exponents = lin.mu + C * column_sum;
        const Eigen::VectorXd v = C.transpose() * shifted_exponentials(exponents);
        Q.col(k) = next_lt_column_from(v, Q.leftCols(k), cursor);
        column_sum += Q.col(k);
    }
    return Q;
}

Eigen::MatrixXd fix_first_column_sign(Eigen::MatrixXd Q, const Eigen::MatrixXd& C,
                                      std::span<const std::size_t> barrier_rows) {
    double total = 0.0;
    for (std::size_t row : barrier_rows) total += C.row(static_cast<Eigen::Index>(row)).dot(Q.col(0));
    if (total < 0.0) Q.col(0) = -Q.col(0);
    return Q;
}

std::vector<std::size_t> barrier_rows(const MarketSpec& spec, const ContractSpec& contract) {
    std::set<std::size_t> rows;
    for (const auto& clause : contract.barriers)
        for (std::size_t j = 0; j < spec.steps; ++j) rows.insert(spec.row(clause.asset, j));
    return {rows.begin(), rows.end()};
}

PathTransform make_cholesky_transform(const Eigen::MatrixXd& C) {
    return {C, TransformKind::cholesky_only, std::nullopt};
}

PathTransform make_lt_transform(const Eigen::MatrixXd& C, const LinearizedPayoff& lin,
                                std::span<const std::size_t> rows) {
    Eigen::MatrixXd Q = fix_first_column_sign(build_lt_matrix(C, lin), C, rows);
    PathTransform t;
    t.A = C * Q;
    t.kind = TransformKind::cholesky_lt;
    t.Q = std::move(Q);
    return t;
}

PathTransform make_lt_transform(const MarketSpec& spec, const ContractSpec& contract) {
    const CovarianceFactor factor = cholesky(build_covariance(spec));
    const auto rows = barrier_rows(spec, contract);
    return make_lt_transform(factor.lower, linearize(spec, contract), rows);
}

}  // namespace bqmc
