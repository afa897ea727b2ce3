#include "bqmc/estimator.hpp"

#include "bqmc/conditional.hpp"
#include "bqmc/errors.hpp"
#include "bqmc/normal.hpp"
#include "bqmc/root_finder.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

namespace bqmc {

namespace {

constexpr std::size_t kBlock = 1024;
constexpr std::size_t kMcChunk = 4096;

std::string upper(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (char& c : out)
        if (c == '+' || c == '-') c = '_';
    return out;
}

// Runs f(k) for k in [0, count) on up to `threads` workers; results are
// written by index so the outcome does not depend on scheduling.
template <class F>
void parallel_for(std::size_t count, std::size_t threads, F&& f) {
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        for (std::size_t k = 0; k < count; ++k) f(k);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t k = t; k < count; k += threads) f(k);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

struct Moments {
    double n = 0.0;
    double mean = 0.0;
    double m2 = 0.0;
    double zero = 0.0;

    void add(double x) {
        n += 1.0;
        const double delta = x - mean;
        mean += delta / n;
        m2 += delta * (x - mean);
    }
    void merge(const Moments& o) {
        if (o.n == 0.0) return;
        const double total = n + o.n;
        const double delta = o.mean - mean;
        mean += delta * o.n / total;
        m2 += o.m2 + delta * delta * n * o.n / total;
        n = total;
        zero += o.zero;
    }
};

}  // namespace

std::string_view method_name(Method m) {
    switch (m) {
    case Method::MC: return "MC";
    case Method::MC_CS: return "MC_CS";
    case Method::QMC_LT: return "QMC_LT";
    case Method::QMC_LT_CS: return "QMC_LT_CS";
    case Method::QMC_LT_CS_RF: return "QMC_LT_CS_RF";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    const std::string key = upper(name);
    for (Method m : {Method::MC, Method::MC_CS, Method::QMC_LT, Method::QMC_LT_CS, Method::QMC_LT_CS_RF})
        if (key == method_name(m)) return m;
    throw std::invalid_argument("unknown method '" + std::string(name) +
                                "' (expected MC, MC_CS, QMC_LT, QMC_LT_CS or QMC_LT_CS_RF)");
}

bool is_qmc(Method m) { return m == Method::QMC_LT || m == Method::QMC_LT_CS || m == Method::QMC_LT_CS_RF; }

std::size_t resolve_threads(std::size_t requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("BQMC_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::optional<double> replication_std_error(const std::vector<double>& means) {
    const std::size_t m = means.size();
    if (m < 2) return std::nullopt;
    double mu = 0.0;
    for (double y : means) mu += y;
    mu /= static_cast<double>(m);
    double ss = 0.0;
    for (double y : means) ss += (y - mu) * (y - mu);
    return std::sqrt(ss / (static_cast<double>(m) * static_cast<double>(m - 1)));
}

Pricer::Pricer(ExperimentConfig config) : config_(std::move(config)) {
    config_.market.validate();
    config_.contract.validate(config_.market);
}

const PathTransform& Pricer::transform() {
    if (!transform_) transform_ = make_lt_transform(config_.market, config_.contract);
    return *transform_;
}

EstimateSummary Pricer::run(Method method) {
    if (is_qmc(method)) return run(method, config_.n, config_.m_shifts);
    return run_mc(method, config_.n_mc);
}

EstimateSummary Pricer::run(Method method, std::size_t n, std::size_t m) {
    if (n == 0 || m == 0) throw std::invalid_argument("budget needs n >= 1 and m >= 1");
    if (is_qmc(method)) return run_qmc(method, n, m);
    EstimateSummary s = run_mc(method, n * m);
    return s;
}

EstimateSummary Pricer::run_qmc(Method method, std::size_t n, std::size_t m) {
    const MarketSpec& spec = config_.market;
    const ContractSpec& contract = config_.contract;
    const std::size_t d = spec.dimension();
    const Eigen::MatrixXd& A = transform().A;

    std::optional<RfSampler> rf;
    if (method == Method::QMC_LT_CS_RF) rf.emplace(spec, contract, A);
    const LtSampler sampler(spec, contract, A);
    const Eigen::MatrixXd A_rest = A.rightCols(static_cast<Eigen::Index>(d - 1));

    PointSetConfig pc;
    pc.kind = config_.points;
    pc.dimension = d;
    pc.count = n;
    pc.seed = config_.seed;
    pc.randomized = true;
    const PointMatrix base = generate_points(pc);
    const RandomizationKind rk = natural_randomization(config_.points);
    const auto shifts = replication_shifts(m, d, config_.seed ^ 0x9e3779b97f4a7c15ULL);

    std::vector<double> means(m, 0.0);
    std::vector<std::size_t> wasted(m, 0);

    parallel_for(m, resolve_threads(config_.threads), [&](std::size_t k) {
        PointMatrix u;
        randomize_into(base, Randomization{rk, shifts[k]}, u);
        Eigen::MatrixXd z(static_cast<Eigen::Index>(d - 1), static_cast<Eigen::Index>(std::min(kBlock, n)));
        Eigen::MatrixXd w;
        std::vector<double> prices(d);
        double sum = 0.0;
        std::size_t zeros = 0;
        for (std::size_t start = 0; start < n; start += kBlock) {
            const auto b = static_cast<Eigen::Index>(std::min(kBlock, n - start));
            if (z.cols() != b) z.resize(z.rows(), b);
            for (Eigen::Index i = 0; i < b; ++i) {
                const double* row = u.row(static_cast<Eigen::Index>(start) + i).data();
                for (std::size_t c = 1; c < d; ++c) z(static_cast<Eigen::Index>(c - 1), i) = norm_inv(row[c]);
            }
            w.noalias() = A_rest * z;
            for (Eigen::Index i = 0; i < b; ++i) {
                const std::span<const double> w_rest(w.col(i).data(), d);
                const double u1 = u(static_cast<Eigen::Index>(start) + i, 0);
                switch (method) {
                case Method::QMC_LT:
                    sum += sampler.plain(w_rest, u1, prices);
                    break;
                case Method::QMC_LT_CS: {
                    const WeightedSample s = sampler.conditional(w_rest, u1, prices);
                    if (s.weight == 0.0) ++zeros;
                    sum += s.value;
                    break;
                }
                default: {
                    const RfResult r = rf->sample(w_rest);
                    if (r.barrier_weight == 0.0) ++zeros;
                    sum += r.value;
                    break;
                }
                }
            }
        }
        means[k] = sum / static_cast<double>(n);
        wasted[k] = zeros;
    });

    EstimateSummary s;
    s.method = method;
    s.n = n;
    s.m = m;
    s.per_shift_means = means;
    double mu = 0.0;
    std::size_t zeros = 0;
    for (std::size_t k = 0; k < m; ++k) {
        mu += means[k];
        zeros += wasted[k];
    }
    s.mean = mu / static_cast<double>(m);
    s.std_error = replication_std_error(means);
    s.wasted_fraction = static_cast<double>(zeros) / static_cast<double>(n * m);
    return s;
}

EstimateSummary Pricer::run_mc(Method method, std::size_t samples) {
    const MarketSpec& spec = config_.market;
    const std::size_t d = spec.dimension();
    const IncrementalSampler sampler(spec, config_.contract, method == Method::MC_CS);
    const std::size_t chunks = (samples + kMcChunk - 1) / kMcChunk;
    std::vector<Moments> parts(chunks);

    parallel_for(chunks, resolve_threads(config_.threads), [&](std::size_t c) {
        std::seed_seq seq{static_cast<std::uint32_t>(config_.seed), static_cast<std::uint32_t>(config_.seed >> 32),
                          static_cast<std::uint32_t>(c)};
        std::mt19937_64 rng(seq);
        std::vector<double> u(d), prices(d);
        const std::size_t count = std::min(kMcChunk, samples - c * kMcChunk);
        Moments mom;
        for (std::size_t i = 0; i < count; ++i) {
            for (double& x : u) {
                do x = uniform53(rng());
                while (x == 0.0);
            }
            const auto r = sampler.sample(u, prices);
            if (r.likelihood == 0.0) mom.zero += 1.0;
            mom.add(r.value);
        }
        parts[c] = mom;
    });

    Moments all;
    for (const auto& p : parts) all.merge(p);
    EstimateSummary s;
    s.method = method;
    s.n = samples;
    s.m = 1;
    s.mean = all.mean;
    if (samples >= 2) s.std_error = std::sqrt(all.m2 / (all.n - 1.0) / all.n);
    s.wasted_fraction = all.zero / all.n;
    return s;
}

EstimateSummary run_estimate(const ExperimentConfig& config, Method method) {
    Pricer pricer(config);
    return pricer.run(method);
}

}  // namespace bqmc
