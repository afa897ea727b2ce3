#include "bqmc/market.hpp"

#include "bqmc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bqmc {

double MarketSpec::time(std::size_t j) const {
    if (!times.empty()) return times.at(j);
    return maturity * static_cast<double>(j + 1) / static_cast<double>(steps);
}

double MarketSpec::step_length(std::size_t j) const {
    return j == 0 ? time(0) : time(j) - time(j - 1);
}

double MarketSpec::log_drift(std::size_t row) const {
    const std::size_t asset = row / steps;
    const double s = sigma[asset];
    return (rate - 0.5 * s * s) * time(row % steps);
}

void MarketSpec::validate() const {
    const std::size_t n = assets();
    if (n == 0) throw std::invalid_argument("market needs at least one asset");
    if (sigma.size() != n) throw std::invalid_argument("sigma size does not match asset count");
    if (rho.rows() != static_cast<Eigen::Index>(n) || rho.cols() != static_cast<Eigen::Index>(n))
        throw std::invalid_argument("correlation matrix must be n x n");
    if (steps == 0) throw std::invalid_argument("need at least one monitoring date");
    if (!(maturity > 0.0)) throw std::invalid_argument("maturity must be positive");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(s0[i] > 0.0)) throw std::invalid_argument("initial price of asset " + std::to_string(i) + " must be positive");
        if (!(sigma[i] > 0.0)) throw std::invalid_argument("volatility of asset " + std::to_string(i) + " must be positive");
        if (std::fabs(rho(i, i) - 1.0) > 1e-12) throw std::invalid_argument("correlation diagonal must be 1");
        for (std::size_t k = 0; k < i; ++k)
            if (std::fabs(rho(i, k) - rho(k, i)) > 1e-12 || std::fabs(rho(i, k)) > 1.0)
                throw std::invalid_argument("correlation matrix must be symmetric with entries in [-1,1]");
    }
    if (!times.empty()) {
        if (times.size() != steps) throw std::invalid_argument("times must list one date per step");
        double prev = 0.0;
        for (double t : times) {
            if (!(t > prev)) throw std::invalid_argument("monitoring dates must be increasing and positive");
            prev = t;
        }
        if (std::fabs(times.back() - maturity) > 1e-12)
            throw std::invalid_argument("last monitoring date must equal maturity");
    }
}

Eigen::MatrixXd build_covariance(const MarketSpec& spec) {
    spec.validate();
    const std::size_t n = spec.assets();
    const std::size_t m = spec.steps;
    Eigen::MatrixXd cov(n * m, n * m);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            const double scale = spec.rho(a, b) * spec.sigma[a] * spec.sigma[b];
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j)
                    cov(a * m + i, b * m + j) = scale * spec.time(std::min(i, j));
        }
    return cov;
}

CovarianceFactor cholesky(const Eigen::MatrixXd& covariance) {
    const Eigen::Index d = covariance.rows();
    if (covariance.cols() != d) throw std::invalid_argument("covariance must be square");
    const double tol = 1e-12 * covariance.diagonal().maxCoeff();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const double pivot = covariance(j, j) - L.row(j).head(j).squaredNorm();
        if (!(pivot > tol))
            throw FactorizationError(static_cast<std::size_t>(j),
                                     "Cholesky pivot " + std::to_string(pivot) + " below tolerance at index " +
                                         std::to_string(j) + " (covariance is rank deficient)");
        const double ljj = std::sqrt(pivot);
        L(j, j) = ljj;
        if (j + 1 < d) {
            const Eigen::Index rest = d - j - 1;
            L.col(j).tail(rest) =
                (covariance.col(j).tail(rest) - L.bottomLeftCorner(rest, j) * L.row(j).head(j).transpose()) / ljj;
        }
    }
    return {std::move(L)};
}

Eigen::MatrixXd prices_from_brownian(const MarketSpec& spec, std::span<const double> w) {
    const std::size_t n = spec.assets();
    const std::size_t m = spec.steps;
    if (w.size() != n * m) throw std::invalid_argument("Brownian vector has wrong dimension");
    Eigen::MatrixXd prices(n, m);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t row = a * m + j;
            prices(a, j) = spec.s0[a] * std::exp(spec.log_drift(row) + w[row]);
        }
    return prices;
}

Eigen::MatrixXd asset_paths(const MarketSpec& spec, const Eigen::MatrixXd& transform,
                            std::span<const double> z) {
    const auto d = static_cast<Eigen::Index>(spec.dimension());
    if (transform.rows() != d || transform.cols() != d || static_cast<Eigen::Index>(z.size()) != d)
        throw std::invalid_argument("transform and normal vector must match the market dimension");
    for (double v : z)
        if (!std::isfinite(v)) throw std::invalid_argument("normal vector has non-finite component");
    const Eigen::VectorXd w = transform * Eigen::Map<const Eigen::VectorXd>(z.data(), d);
    return prices_from_brownian(spec, std::span<const double>(w.data(), w.size()));
}

Eigen::MatrixXd uniform_correlation(std::size_t n, double rho) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Constant(n, n, rho);
    r.diagonal().setOnes();
    return r;
}

}  // namespace bqmc
