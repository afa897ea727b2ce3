#pragma once

#include "bqmc/contracts.hpp"
#include "bqmc/lt_transform.hpp"
#include "bqmc/market.hpp"
#include "bqmc/qmc.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bqmc {

enum class Method { MC, MC_CS, QMC_LT, QMC_LT_CS, QMC_LT_CS_RF };

std::string_view method_name(Method m);
/// Accepts the names above, case-insensitively; throws std::invalid_argument.
Method parse_method(std::string_view name);
bool is_qmc(Method m);

struct EstimateSummary {
    Method method = Method::QMC_LT;
    double mean = 0.0;
    /// Absent when fewer than two replications (or samples) exist.
    std::optional<double> std_error;
    /// Points per replication; for MC methods the total sample count.
    std::size_t n = 0;
    /// Replications; 1 for MC methods.
    std::size_t m = 0;
    double wasted_fraction = 0.0;
    std::vector<double> per_shift_means;
};

struct ExperimentConfig {
    std::string name;
    MarketSpec market;
    ContractSpec contract;
    std::vector<Method> methods;
    std::size_t n = 4096;
    std::size_t m_shifts = 40;
    std::size_t n_mc = 163840;
    std::uint64_t seed = 20120101;
    PointKind points = PointKind::sobol;
    Method baseline = Method::MC_CS;
    /// 0 means: BQMC_THREADS from the environment, else hardware concurrency.
    std::size_t threads = 0;
};

/// Worker count used for a run (config value, environment override, hardware).
std::size_t resolve_threads(std::size_t requested);

/// Runs estimates for one market/contract pair, building the LT transform once.
class Pricer {
public:
    explicit Pricer(ExperimentConfig config);

    EstimateSummary run(Method method);
    /// Explicit budget: QMC uses n points times m shifts, MC uses n * m samples.
    EstimateSummary run(Method method, std::size_t n, std::size_t m);

    const PathTransform& transform();
    const ExperimentConfig& config() const noexcept { return config_; }

private:
    EstimateSummary run_qmc(Method method, std::size_t n, std::size_t m);
    EstimateSummary run_mc(Method method, std::size_t samples);

    ExperimentConfig config_;
    std::optional<PathTransform> transform_;
};

EstimateSummary run_estimate(const ExperimentConfig& config, Method method);

/// sqrt(sum (y_k - mean)^2 / (M (M - 1))); empty when M < 2.
std::optional<double> replication_std_error(const std::vector<double>& means);

}  // namespace bqmc
