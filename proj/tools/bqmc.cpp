#include "bqmc/config.hpp"
#include "bqmc/csv.hpp"
#include "bqmc/errors.hpp"
#include "bqmc/estimator.hpp"
#include "bqmc/experiments.hpp"
#include "bqmc/selftest.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "experiment file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "override the seed of every experiment");
    cmd->add_option("--threads", c.threads, "worker threads (default: BQMC_THREADS or all cores)");
    cmd->add_option("--out", c.out, "CSV output path (default: stdout)");
}

std::vector<bqmc::ExperimentConfig> load(const Common& c) {
    auto configs = bqmc::load_config(c.config);
    for (auto& cfg : configs) {
        if (c.seed) cfg.seed = *c.seed;
        if (c.threads) cfg.threads = *c.threads;
    }
    return configs;
}

void emit(const Common& c, const bqmc::CsvTable& table) {
    if (c.out.empty()) {
        bqmc::write_csv(std::cout, table);
        return;
    }
    std::ofstream f(c.out);
    if (!f) throw std::runtime_error("cannot write " + c.out);
    bqmc::write_csv(f, table);
}

std::vector<bqmc::Method> parse_methods(const std::vector<std::string>& names) {
    std::vector<bqmc::Method> out;
    for (const auto& n : names) out.push_back(bqmc::parse_method(n));
    return out;
}

void require_replications(const bqmc::ExperimentConfig& cfg, const std::vector<bqmc::Method>& methods) {
    for (bqmc::Method m : methods)
        if (bqmc::is_qmc(m) && cfg.m_shifts < 2)
            throw std::invalid_argument("[" + cfg.name + "] m_shifts = " + std::to_string(cfg.m_shifts) +
                                        ": the standard error needs M >= 2 replications");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Barrier option pricing with randomized QMC, the LT construction and conditional sampling"};
    app.require_subcommand(1);

    Common price_opts, table_opts, conv_opts;
    std::vector<std::string> price_methods, table_methods, conv_methods;
    std::string table_baseline;
    int grid_lo = 6, grid_hi = 13;

    auto* price = app.add_subcommand("price", "estimate every configured method for every experiment");
    add_common(price, price_opts);
    price->add_option("--method", price_methods, "restrict to these methods");

    auto* table = app.add_subcommand("table", "standard-error ratio table against a baseline method");
    add_common(table, table_opts);
    table->add_option("--baseline", table_baseline, "baseline method (default: per experiment)");
    table->add_option("--method", table_methods, "comparison methods (default: per experiment)");

    auto* conv = app.add_subcommand("convergence", "regress log sigma on log N over a power-of-two grid");
    add_common(conv, conv_opts);
    conv->add_option("--method", conv_methods, "methods (default: per experiment)");
    conv->add_option("--grid-min", grid_lo, "smallest budget exponent")->check(CLI::Range(1, 30));
    conv->add_option("--grid-max", grid_hi, "largest budget exponent")->check(CLI::Range(1, 30));

    auto* self = app.add_subcommand("selftest", "run the built-in invariant checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*price) {
            const auto configs = load(price_opts);
            std::vector<std::string> names;
            std::vector<bqmc::EstimateSummary> summaries;
            for (const auto& cfg : configs) {
                const auto methods = price_methods.empty() ? cfg.methods : parse_methods(price_methods);
                require_replications(cfg, methods);
                bqmc::Pricer pricer(cfg);
                for (bqmc::Method m : methods) {
                    summaries.push_back(pricer.run(m));
                    names.push_back(cfg.name);
                }
            }
            emit(price_opts, bqmc::summary_csv(names, summaries));
        } else if (*table) {
            const auto configs = load(table_opts);
            std::optional<bqmc::Method> baseline;
            if (!table_baseline.empty()) baseline = bqmc::parse_method(table_baseline);
            const auto methods = parse_methods(table_methods);
            for (const auto& cfg : configs) {
                require_replications(cfg, methods.empty() ? cfg.methods : methods);
                require_replications(cfg, {baseline.value_or(cfg.baseline)});
            }
            const auto result = bqmc::variance_ratio_table(configs, baseline, methods,
                                                           [](const std::string& name, bqmc::Method m) {
                                                               std::cerr << "running " << name << " "
                                                                         << bqmc::method_name(m) << '\n';
                                                           });
            emit(table_opts, bqmc::ratio_csv(result));
        } else if (*conv) {
            if (grid_hi - grid_lo < 3) throw std::invalid_argument("the convergence grid needs at least four budgets");
            const auto configs = load(conv_opts);
            bqmc::CsvTable all;
            for (const auto& cfg : configs) {
                const auto methods = conv_methods.empty() ? cfg.methods : parse_methods(conv_methods);
                require_replications(cfg, methods);
                for (bqmc::Method m : methods) {
                    const auto r = bqmc::convergence_alpha(cfg, m, bqmc::power_of_two_grid(grid_lo, grid_hi));
                    for (std::size_t n : r.excluded)
                        std::cerr << "warning: " << cfg.name << " " << bqmc::method_name(m) << " N=" << n
                                  << " has zero standard error and was excluded\n";
                    std::cout << "alpha " << cfg.name << " " << bqmc::method_name(m) << " "
                              << bqmc::format_double(r.alpha) << " beta " << bqmc::format_double(r.beta) << '\n';
                    const auto t = bqmc::convergence_csv(cfg.name, r);
                    all.header = t.header;
                    all.rows.insert(all.rows.end(), t.rows.begin(), t.rows.end());
                }
            }
            if (!conv_opts.out.empty()) emit(conv_opts, all);
        } else if (*self) {
            return bqmc::run_selftest(std::cout) == 0 ? 0 : 1;
        }
    } catch (const bqmc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const bqmc::CapabilityError& e) {
        std::cerr << "unsupported: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
