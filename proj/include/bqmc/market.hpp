#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace bqmc {

/// Multi-asset Black–Scholes market monitored on a discrete grid.
///
/// Rows of every mn-sized object (covariance, transform, scaled Brownian
/// vector) are ordered asset-major, time-minor: row `asset * m + j` holds asset
/// `asset` at monitoring date t_{j+1}.
struct MarketSpec {
    std::vector<double> s0;
    std::vector<double> sigma;
    Eigen::MatrixXd rho;
    double rate = 0.0;
    double maturity = 1.0;
    std::size_t steps = 1;
    /// Optional explicit monitoring dates t_1 < ... < t_m (t_m = maturity);
    /// empty means the equally spaced grid j * maturity / steps.
    std::vector<double> times;

    std::size_t assets() const noexcept { return s0.size(); }
    std::size_t dimension() const noexcept { return assets() * steps; }
    std::size_t row(std::size_t asset, std::size_t j) const noexcept { return asset * steps + j; }

    /// Monitoring date t_{j+1}, j in [0, steps).
    double time(std::size_t j) const;
    /// t_{j+1} - t_j with t_0 = 0.
    double step_length(std::size_t j) const;
    /// Log-drift (r - sigma^2/2) t of row i.
    double log_drift(std::size_t row) const;

    /// Throws std::invalid_argument naming the violated invariant.
    void validate() const;
};

/// Covariance of the scaled Brownian vector (sigma_i W_i(t_j)) in row order.
Eigen::MatrixXd build_covariance(const MarketSpec& spec);

struct CovarianceFactor {
    Eigen::MatrixXd lower;
};

/// Lower Cholesky factor. Throws FactorizationError when a pivot drops below
/// 1e-12 * max diagonal.
CovarianceFactor cholesky(const Eigen::MatrixXd& covariance);

/// Prices (n x m) from the scaled Brownian vector w = A z.
Eigen::MatrixXd prices_from_brownian(const MarketSpec& spec, std::span<const double> w);

/// Prices (n x m) for standard normal input z under transform A.
Eigen::MatrixXd asset_paths(const MarketSpec& spec, const Eigen::MatrixXd& transform,
                            std::span<const double> z);

/// Equicorrelation matrix with off-diagonal value `rho`.
Eigen::MatrixXd uniform_correlation(std::size_t n, double rho);

}  // namespace bqmc
