#pragma once

#include "bqmc/estimator.hpp"
#include "bqmc/experiments.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace bqmc {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);

void write_csv(std::ostream& out, const CsvTable& table);
/// Reads the plain comma-separated format written above (no quoting).
CsvTable read_csv(std::istream& in);

/// config, method, mean, stderr, n, m, wasted_fraction
CsvTable summary_csv(const std::vector<std::string>& configs, const std::vector<EstimateSummary>& summaries);
/// config, method, sigma, ratio_pct
CsvTable ratio_csv(const RatioTable& table);
/// config, method, n, mean, sigma
CsvTable convergence_csv(const std::string& config, const ConvergenceResult& result);

}  // namespace bqmc
