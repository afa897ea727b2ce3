#include "bqmc/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace bqmc {

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("cannot format number");
    return std::string(buf, ptr);
}

double parse_double(std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("not a number: '" + std::string(s) + "'");
    return v;
}

void write_csv(std::ostream& out, const CsvTable& table) {
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << '\n';
    };
    line(table.header);
    for (const auto& row : table.rows) line(row);
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (first) table.header = std::move(cells);
        else table.rows.push_back(std::move(cells));
        first = false;
    }
    return table;
}

CsvTable summary_csv(const std::vector<std::string>& configs, const std::vector<EstimateSummary>& summaries) {
    CsvTable t;
    t.header = {"config", "method", "mean", "stderr", "n", "m", "wasted_fraction"};
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        const auto& s = summaries[i];
        t.rows.push_back({configs.at(i), std::string(method_name(s.method)), format_double(s.mean),
                          s.std_error ? format_double(*s.std_error) : std::string(), std::to_string(s.n),
                          std::to_string(s.m), format_double(s.wasted_fraction)});
    }
    return t;
}

CsvTable ratio_csv(const RatioTable& table) {
    CsvTable t;
    t.header = {"config", "method", "sigma", "ratio_pct"};
    for (const auto& r : table.rows)
        t.rows.push_back({r.config, std::string(method_name(r.method)), format_double(r.sigma),
                          format_double(r.ratio_pct)});
    return t;
}

CsvTable convergence_csv(const std::string& config, const ConvergenceResult& result) {
    CsvTable t;
    t.header = {"config", "method", "n", "mean", "sigma"};
    for (const auto& p : result.points)
        t.rows.push_back({config, std::string(method_name(result.method)), std::to_string(p.n), format_double(p.mean),
                          format_double(p.sigma)});
    return t;
}

}  // namespace bqmc
