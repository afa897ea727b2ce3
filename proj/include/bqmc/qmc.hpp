#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace bqmc {

enum class PointKind { sobol, lattice, pseudo_random };
enum class RandomizationKind { none, digital_shift, mod1_shift };

/// N points stored one per row; a transposed view gives the d x N
/// column-per-point layout the path builders multiply against.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct PointSetConfig {
    PointKind kind = PointKind::sobol;
    std::size_t dimension = 1;
    std::size_t count = 1;
    std::uint64_t seed = 0;
    /// Unrandomized Sobol' sets skip the all-zero point at index 0; sets that
    /// will be shifted keep it.
    bool randomized = false;
};

struct Randomization {
    RandomizationKind kind = RandomizationKind::none;
    std::vector<double> shift;
};

/// Joe–Kuo direction numbers, one row of 32-bit values per dimension.
class SobolTable {
public:
    static constexpr int kBits = 32;

    static SobolTable load(const std::filesystem::path& file);

    std::size_t max_dimension() const noexcept { return directions_.size(); }
    /// Direction numbers of dimension `dim` (0-based), scaled to 32 bits.
    const std::array<std::uint32_t, kBits>& directions(std::size_t dim) const {
        return directions_.at(dim);
    }

private:
    std::vector<std::array<std::uint32_t, kBits>> directions_;
};

/// Generating vector of an extensible base-2 rank-1 lattice.
class LatticeVector {
public:
    static LatticeVector load(const std::filesystem::path& file);

    std::size_t max_dimension() const noexcept { return z_.size(); }
    std::uint64_t operator[](std::size_t j) const { return z_.at(j); }

private:
    std::vector<std::uint64_t> z_;
};

/// Data directory: $BQMC_DATA_DIR if set, else the source tree's data/.
std::filesystem::path data_directory();
const SobolTable& default_sobol_table();
const LatticeVector& default_lattice_vector();

/// Deterministic point set (N x dimension, all coordinates in [0,1)).
/// Throws CapabilityError when the dimension exceeds the stored tables.
PointMatrix generate_points(const PointSetConfig& config);

/// Digital shift (xor of 53-bit expansions) or mod-1 shift of every point.
PointMatrix randomize(const PointMatrix& points, const Randomization& r);
void randomize_into(const PointMatrix& points, const Randomization& r, PointMatrix& out);

/// M independent uniform shift vectors in [0,1)^dimension from a mt19937_64 stream.
std::vector<std::vector<double>> replication_shifts(std::size_t count, std::size_t dimension,
                                                    std::uint64_t seed);

/// The randomization paired with a point kind: digital shift for Sobol',
/// mod-1 shift for lattices, none for pseudo-random points.
RandomizationKind natural_randomization(PointKind kind);

/// 53-bit uniform in [0,1) from one 64-bit draw.
inline double uniform53(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace bqmc
