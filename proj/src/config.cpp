#include "bqmc/config.hpp"

#include "bqmc/errors.hpp"
#include "bqmc/market.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace bqmc {

namespace {

struct Entry {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

struct Section {
    std::string name;
    std::size_t line = 0;
    std::vector<Entry> entries;
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

double to_double(const Entry& e, const std::string& tok) {
    double v = 0.0;
    const char* end = tok.data() + tok.size();
    const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError(e.line, e.key, "'" + tok + "' is not a number");
    return v;
}

std::uint64_t to_unsigned(const Entry& e, const std::string& tok) {
    std::uint64_t v = 0;
    const char* end = tok.data() + tok.size();
    const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError(e.line, e.key, "'" + tok + "' is not a non-negative integer");
    return v;
}

std::vector<double> numbers(const Entry& e) {
    std::vector<double> out;
    for (const auto& tok : split_ws(e.value)) out.push_back(to_double(e, tok));
    if (out.empty()) throw ConfigError(e.line, e.key, "expected at least one number");
    return out;
}

double number(const Entry& e) {
    const auto v = numbers(e);
    if (v.size() != 1) throw ConfigError(e.line, e.key, "expected a single number");
    return v.front();
}

std::uint64_t integer(const Entry& e) {
    const auto toks = split_ws(e.value);
    if (toks.size() != 1) throw ConfigError(e.line, e.key, "expected a single integer");
    return to_unsigned(e, toks.front());
}

PayoffFamily parse_family(const Entry& e) {
    static const std::map<std::string, PayoffFamily> names{{"asian_basket_call", PayoffFamily::asian_basket_call},
                                                           {"binary_asian", PayoffFamily::binary_asian},
                                                           {"binary", PayoffFamily::binary},
                                                           {"vanilla_put", PayoffFamily::vanilla_put}};
    const auto it = names.find(e.value);
    if (it == names.end())
        throw ConfigError(e.line, e.key, "unknown family '" + e.value +
                                             "' (asian_basket_call, binary_asian, binary, vanilla_put)");
    return it->second;
}

PointKind parse_points(const Entry& e) {
    if (e.value == "sobol") return PointKind::sobol;
    if (e.value == "lattice") return PointKind::lattice;
    throw ConfigError(e.line, e.key, "unknown point set '" + e.value + "' (sobol, lattice)");
}

BarrierClause parse_barrier(const Entry& e) {
    const auto toks = split_ws(e.value);
    if (toks.size() != 4) throw ConfigError(e.line, e.key, "expected '<out|in> <up|down> <asset> <level>'");
    BarrierClause c;
    if (toks[0] == "out") c.type = BarrierType::knock_out;
    else if (toks[0] == "in") c.type = BarrierType::knock_in;
    else throw ConfigError(e.line, e.key, "barrier type must be 'out' or 'in'");
    if (toks[1] == "up") c.direction = Direction::up;
    else if (toks[1] == "down") c.direction = Direction::down;
    else throw ConfigError(e.line, e.key, "barrier direction must be 'up' or 'down'");
    c.asset = static_cast<std::size_t>(to_unsigned(e, toks[2]));
    c.level = to_double(e, toks[3]);
    if (!(c.level > 0.0)) throw ConfigError(e.line, e.key, "barrier level must be positive");
    return c;
}

Eigen::MatrixXd parse_correlation(const Entry& e, std::size_t n) {
    const auto toks = split_ws(e.value);
    if (!toks.empty() && toks[0] == "uniform") {
        if (toks.size() != 2) throw ConfigError(e.line, e.key, "expected 'uniform <rho>'");
        return uniform_correlation(n, to_double(e, toks[1]));
    }
    Eigen::MatrixXd rho(n, n);
    std::istringstream rows(e.value);
    std::string row;
    std::size_t i = 0;
    while (std::getline(rows, row, ';')) {
        const auto vals = split_ws(row);
        if (vals.empty()) continue;
        if (i >= n || vals.size() != n)
            throw ConfigError(e.line, e.key, "expected " + std::to_string(n) + " rows of " + std::to_string(n) +
                                                 " values separated by ';'");
        for (std::size_t k = 0; k < n; ++k) rho(i, k) = to_double(e, vals[k]);
        ++i;
    }
    if (i != n) throw ConfigError(e.line, e.key, "expected " + std::to_string(n) + " rows");
    return rho;
}

const Entry* last(const std::map<std::string, const Entry*>& m, const char* key) {
    const auto it = m.find(key);
    return it == m.end() ? nullptr : it->second;
}

ExperimentConfig build(const Section& defaults, const Section& section) {
    std::map<std::string, const Entry*> keys;
    std::vector<const Entry*> barriers;
    bool section_barriers = false;
    for (const Section* s : {&defaults, &section}) {
        for (const Entry& e : s->entries) {
            if (e.key == "barrier") {
                if (s == &section && !section_barriers) {
                    barriers.clear();
                    section_barriers = true;
                }
                if (e.value == "none") barriers.clear();
                else barriers.push_back(&e);
            } else {
                keys[e.key] = &e;
            }
        }
    }
    static const char* known[] = {"assets", "s0",     "sigma", "correlation", "rate",     "maturity",
                                  "steps",  "times",  "family", "strike",     "weights",  "put_asset",
                                  "methods", "points", "n",     "m_shifts",   "n_mc",     "seed",
                                  "baseline", "threads"};
    for (const auto& [key, entry] : keys) {
        bool ok = false;
        for (const char* k : known) ok |= key == k;
        if (!ok) throw ConfigError(entry->line, key, "unknown key");
    }

    auto require = [&](const char* key) -> const Entry& {
        const Entry* e = last(keys, key);
        if (!e) throw ConfigError(section.line, key, "missing in section [" + section.name + "]");
        return *e;
    };

    ExperimentConfig cfg;
    cfg.name = section.name;
    MarketSpec& m = cfg.market;

    const Entry& s0 = require("s0");
    m.s0 = numbers(s0);
    std::size_t n = m.s0.size();
    if (const Entry* e = last(keys, "assets")) {
        n = static_cast<std::size_t>(integer(*e));
        if (m.s0.size() == 1 && n > 1) m.s0.assign(n, m.s0.front());
        if (m.s0.size() != n) throw ConfigError(s0.line, "s0", "expected " + std::to_string(n) + " values");
    }
    const Entry& sig = require("sigma");
    m.sigma = numbers(sig);
    if (m.sigma.size() == 1 && n > 1) m.sigma.assign(n, m.sigma.front());
    if (m.sigma.size() != n) throw ConfigError(sig.line, "sigma", "expected " + std::to_string(n) + " values");
    if (const Entry* e = last(keys, "correlation")) m.rho = parse_correlation(*e, n);
    else if (n == 1) m.rho = Eigen::MatrixXd::Ones(1, 1);
    else throw ConfigError(section.line, "correlation", "required for more than one asset");
    m.rate = number(require("rate"));
    m.maturity = number(require("maturity"));
    m.steps = static_cast<std::size_t>(integer(require("steps")));
    if (const Entry* e = last(keys, "times")) m.times = numbers(*e);
    try {
        m.validate();
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(section.line, "market", ex.what());
    }

    ContractSpec& c = cfg.contract;
    c.family = parse_family(require("family"));
    if (c.family != PayoffFamily::binary) c.strike = number(require("strike"));
    else if (const Entry* e = last(keys, "strike")) c.strike = number(*e);
    if (const Entry* e = last(keys, "weights")) c.weights = numbers(*e);
    if (const Entry* e = last(keys, "put_asset")) c.put_asset = static_cast<std::size_t>(integer(*e));
    for (const Entry* e : barriers) c.barriers.push_back(parse_barrier(*e));
    try {
        c.validate(m);
    } catch (const std::invalid_argument& ex) {
        const std::size_t line = barriers.empty() ? section.line : barriers.back()->line;
        throw ConfigError(line, "contract", ex.what());
    }

    if (const Entry* e = last(keys, "methods")) {
        for (const auto& tok : split_ws(e->value)) {
            try {
                cfg.methods.push_back(parse_method(tok));
            } catch (const std::invalid_argument& ex) {
                throw ConfigError(e->line, e->key, ex.what());
            }
        }
    } else {
        cfg.methods = {Method::QMC_LT, Method::QMC_LT_CS};
    }
    if (const Entry* e = last(keys, "baseline")) {
        try {
            cfg.baseline = parse_method(e->value);
        } catch (const std::invalid_argument& ex) {
            throw ConfigError(e->line, e->key, ex.what());
        }
    }
    if (const Entry* e = last(keys, "points")) cfg.points = parse_points(*e);
    if (const Entry* e = last(keys, "n")) cfg.n = static_cast<std::size_t>(integer(*e));
    if (const Entry* e = last(keys, "m_shifts")) cfg.m_shifts = static_cast<std::size_t>(integer(*e));
    if (const Entry* e = last(keys, "n_mc")) cfg.n_mc = static_cast<std::size_t>(integer(*e));
    if (const Entry* e = last(keys, "seed")) cfg.seed = integer(*e);
    if (const Entry* e = last(keys, "threads")) cfg.threads = static_cast<std::size_t>(integer(*e));
    if (cfg.n == 0) throw ConfigError(last(keys, "n")->line, "n", "must be at least 1");
    if (cfg.m_shifts == 0) throw ConfigError(last(keys, "m_shifts")->line, "m_shifts", "must be at least 1");
    if (cfg.n_mc == 0) throw ConfigError(last(keys, "n_mc")->line, "n_mc", "must be at least 1");
    return cfg;
}

}  // namespace

std::vector<ExperimentConfig> parse_config(std::string_view text) {
    Section defaults{"defaults", 0, {}};
    std::vector<Section> sections;
    Section* current = nullptr;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) throw ConfigError(line_no, "section", "malformed header");
            const std::string name = trim(std::string_view(line).substr(1, line.size() - 2));
            if (name == "defaults") {
                current = &defaults;
                defaults.line = line_no;
                continue;
            }
            for (const auto& s : sections)
                if (s.name == name) throw ConfigError(line_no, "section", "duplicate section [" + name + "]");
            sections.push_back({name, line_no, {}});
            current = &sections.back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(line_no, trim(line), "expected 'key = value'");
        Entry e{trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)), line_no};
        if (e.key.empty()) throw ConfigError(line_no, "key", "empty key");
        if (e.value.empty()) throw ConfigError(line_no, e.key, "empty value");
        if (!current) throw ConfigError(line_no, e.key, "key outside of any section");
        current->entries.push_back(std::move(e));
    }
    if (sections.empty()) throw ConfigError(line_no, "section", "no experiment sections");
    std::vector<ExperimentConfig> out;
    for (const auto& s : sections) out.push_back(build(defaults, s));
    return out;
}

std::vector<ExperimentConfig> load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError(0, "file", "cannot read " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace bqmc
