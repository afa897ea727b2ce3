#include "bqmc/qmc.hpp"

#include "bqmc/errors.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#ifndef BQMC_DEFAULT_DATA_DIR
#define BQMC_DEFAULT_DATA_DIR "data"
#endif

namespace bqmc {

namespace {

constexpr double kTwo53 = 0x1.0p53;
constexpr int kShiftTo53 = 53 - SobolTable::kBits;

std::uint64_t to_fixed53(double u) {
    return static_cast<std::uint64_t>(u * kTwo53);
}

}  // namespace

SobolTable SobolTable::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open Sobol' table " + file.string());

    SobolTable table;
    // first coordinate: van der Corput, m_k = 1
    std::array<std::uint32_t, kBits> first{};
    for (int k = 0; k < kBits; ++k) first[k] = 1u << (kBits - 1 - k);
    table.directions_.push_back(first);

    std::string line;
    std::getline(in, line);  // header
    std::size_t expected = 2;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::size_t d = 0;
        int s = 0;
        std::uint32_t a = 0;
        fields >> d >> s >> a;
        if (!fields || d != expected || s < 1 || s > kBits)
            throw std::runtime_error("malformed Sobol' table row for dimension " +
                                     std::to_string(expected));
        std::array<std::uint32_t, kBits> v{};
        for (int k = 0; k < s; ++k) {
            std::uint32_t m = 0;
            fields >> m;
            if (!fields) throw std::runtime_error("missing m_i in Sobol' table row " + std::to_string(d));
            v[k] = m << (kBits - 1 - k);
        }
        for (int k = s; k < kBits; ++k) {
            std::uint32_t value = v[k - s] ^ (v[k - s] >> s);
            for (int i = 1; i < s; ++i) {
                if ((a >> (s - 1 - i)) & 1u) value ^= v[k - i];
            }
            v[k] = value;
        }
        table.directions_.push_back(v);
        ++expected;
    }
    return table;
}

LatticeVector LatticeVector::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open lattice vector " + file.string());
    LatticeVector lattice;
    std::uint64_t z = 0;
    while (in >> z) lattice.z_.push_back(z);
    if (lattice.z_.empty()) throw std::runtime_error("empty lattice vector " + file.string());
    return lattice;
}

std::filesystem::path data_directory() {
    if (const char* env = std::getenv("BQMC_DATA_DIR"); env != nullptr && *env != '\0')
        return env;
    return BQMC_DEFAULT_DATA_DIR;
}

const SobolTable& default_sobol_table() {
    static const SobolTable table = SobolTable::load(data_directory() / "sobol_joe_kuo.txt");
    return table;
}

const LatticeVector& default_lattice_vector() {
    static const LatticeVector lattice =
        LatticeVector::load(data_directory() / "lattice_korobov_base2.txt");
    return lattice;
}

PointMatrix generate_points(const PointSetConfig& config) {
    if (config.count == 0 || config.dimension == 0)
        throw std::invalid_argument("point set needs count >= 1 and dimension >= 1");
    const std::size_t n = config.count;
    const std::size_t d = config.dimension;
    PointMatrix points(n, d);

    switch (config.kind) {
    case PointKind::sobol: {
        const SobolTable& table = default_sobol_table();
        if (d > table.max_dimension())
            throw CapabilityError("Sobol' table supports at most " +
                                  std::to_string(table.max_dimension()) + " dimensions, requested " +
                                  std::to_string(d));
        const std::size_t first = config.randomized ? 0 : 1;
        if (first + n - 1 >= (std::uint64_t{1} << SobolTable::kBits))
            throw CapabilityError("Sobol' generator limited to 2^32 points");
        std::vector<std::uint32_t> x(d, 0);
        // Gray-code recursion; x holds point `index`.
        std::size_t index = 0;
        auto advance = [&] {
            ++index;
            const int c = std::countr_zero(index);
            for (std::size_t j = 0; j < d; ++j) x[j] ^= table.directions(j)[c];
        };
        for (std::size_t s = 0; s < first; ++s) advance();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j)
                points(i, j) = static_cast<double>(std::uint64_t{x[j]} << kShiftTo53) / kTwo53;
            if (i + 1 < n) advance();
        }
        break;
    }
    case PointKind::lattice: {
        const LatticeVector& z = default_lattice_vector();
        if (d > z.max_dimension())
            throw CapabilityError("lattice generating vector supports at most " +
                                  std::to_string(z.max_dimension()) + " dimensions, requested " +
                                  std::to_string(d));
        const std::uint64_t count = n;
        for (std::size_t j = 0; j < d; ++j) {
            const std::uint64_t zj = z[j] % count;
            for (std::uint64_t i = 0; i < count; ++i) {
                const unsigned __int128 prod = static_cast<unsigned __int128>(i) * zj;
                points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    static_cast<double>(static_cast<std::uint64_t>(prod % count)) /
                    static_cast<double>(count);
            }
        }
        break;
    }
    case PointKind::pseudo_random: {
        std::mt19937_64 rng(config.seed);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) points(i, j) = uniform53(rng());
        break;
    }
    }
    return points;
}

void randomize_into(const PointMatrix& points, const Randomization& r, PointMatrix& out) {
    const auto d = points.cols();
    if (r.kind != RandomizationKind::none && static_cast<Eigen::Index>(r.shift.size()) != d)
        throw std::invalid_argument("shift dimension " + std::to_string(r.shift.size()) +
                                    " does not match point dimension " + std::to_string(d));
    out.resize(points.rows(), d);
    switch (r.kind) {
    case RandomizationKind::none:
        out = points;
        break;
    case RandomizationKind::digital_shift: {
        std::vector<std::uint64_t> shift(d);
        for (Eigen::Index j = 0; j < d; ++j) shift[j] = to_fixed53(r.shift[j]);
        for (Eigen::Index i = 0; i < points.rows(); ++i)
            for (Eigen::Index j = 0; j < d; ++j)
                out(i, j) = static_cast<double>(to_fixed53(points(i, j)) ^ shift[j]) / kTwo53;
        break;
    }
    case RandomizationKind::mod1_shift:
        for (Eigen::Index i = 0; i < points.rows(); ++i)
            for (Eigen::Index j = 0; j < d; ++j) {
                double v = points(i, j) + r.shift[j];
                if (v >= 1.0) v -= 1.0;
                out(i, j) = v;
            }
        break;
    }
}

PointMatrix randomize(const PointMatrix& points, const Randomization& r) {
    PointMatrix out;
    randomize_into(points, r, out);
    return out;
}

std::vector<std::vector<double>> replication_shifts(std::size_t count, std::size_t dimension,
                                                    std::uint64_t seed) {
    if (count == 0) throw std::invalid_argument("need at least one shift");
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> shifts(count, std::vector<double>(dimension));
    for (auto& shift : shifts)
        for (double& v : shift) v = uniform53(rng());
    return shifts;
}

RandomizationKind natural_randomization(PointKind kind) {
    switch (kind) {
    case PointKind::sobol: return RandomizationKind::digital_shift;
    case PointKind::lattice: return RandomizationKind::mod1_shift;
    case PointKind::pseudo_random: return RandomizationKind::none;
    }
    return RandomizationKind::none;
}

}  // namespace bqmc
