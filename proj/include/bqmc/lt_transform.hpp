#pragma once

#include "bqmc/contracts.hpp"
#include "bqmc/market.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace bqmc {

enum class TransformKind { cholesky_only, cholesky_lt };

/// Factor A with A A' = covariance, used as w = A z.
struct PathTransform {
    Eigen::MatrixXd A;
    TransformKind kind = TransformKind::cholesky_only;
    std::optional<Eigen::MatrixXd> Q;
};

/// Log-linear model of the smooth payoff part: f ~ sum_i exp(mu_i + w_i).
struct LinearizedPayoff {
    Eigen::VectorXd mu;

    /// mu_i = log(w_i S_{asset(i)}(0)) + (r - sigma^2/2) t_i; zero weights give -inf.
    static LinearizedPayoff from_weights(const MarketSpec& spec, std::span<const double> weights);
};

/// Smooth part used to orient the LT columns for a contract: the averaging
/// weights for the Asian families and the binary payoff, the terminal price
/// for the put.
LinearizedPayoff linearize(const MarketSpec& spec, const ContractSpec& contract);

/// Gradient direction of the linearized payoff at the k-th expansion point:
/// v = sum_i exp(mu_i + sum_{j<k} <C_i, Q_j>) C_i, with previous columns in
/// `previous` (mn x (k-1)). Exponentials are shifted by their maximum, so v
/// is returned up to a positive factor.
Eigen::VectorXd lt_gradient_vector(const Eigen::MatrixXd& C, const Eigen::MatrixXd& previous,
                                   const LinearizedPayoff& lin);

/// Unit maximizer of <v, q>^2 over q orthogonal to `previous`: the projection
/// of v onto the orthogonal complement, normalized. A numerically vanishing
/// projection falls back to the first canonical basis vector that keeps a
/// usable projection.
Eigen::VectorXd next_lt_column(const Eigen::VectorXd& v, const Eigen::MatrixXd& previous);

/// All mn LT columns.
Eigen::MatrixXd build_lt_matrix(const Eigen::MatrixXd& C, const LinearizedPayoff& lin);

/// Negates the first column of Q when the barrier rows of (C Q)'s first
/// column sum to a negative value.
Eigen::MatrixXd fix_first_column_sign(Eigen::MatrixXd Q, const Eigen::MatrixXd& C,
                                      std::span<const std::size_t> barrier_rows);

/// Rows of every barrier clause's asset (deduplicated, ascending).
std::vector<std::size_t> barrier_rows(const MarketSpec& spec, const ContractSpec& contract);

PathTransform make_cholesky_transform(const Eigen::MatrixXd& C);
PathTransform make_lt_transform(const Eigen::MatrixXd& C, const LinearizedPayoff& lin,
                                std::span<const std::size_t> barrier_rows);
/// Covariance, Cholesky factor and sign-fixed LT transform for a contract.
PathTransform make_lt_transform(const MarketSpec& spec, const ContractSpec& contract);

}  // namespace bqmc
