#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace relax {

/// Rows are points, columns are input dimensions.
using SampleMatrix = Eigen::MatrixXd;

struct RngSeed {
    std::uint64_t value = 0;

    friend bool operator==(RngSeed, RngSeed) = default;
};

/// Named sub-streams derived from a run seed.
enum class Stream : std::uint64_t {
    InitialDesign = 1,
    CandidatePool = 2,
    ReliabilityMcs = 3,
    RetryDesign = 4,
    Chunk = 5,
};

/// Counter-based split: a pure function of (base, stream, counter).
RngSeed derive_seed(RngSeed base, Stream stream, std::uint64_t counter);

/// mt19937_64 with portable uniform and integer draws.
class Rng {
public:
    explicit Rng(RngSeed seed) : engine_(seed.value) {}

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform_open() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    /// Standard normal by inversion.
    double normal();

private:
    std::mt19937_64 engine_;
};

/// Latin hypercube design in (0,1)^m: one uniformly placed point per stratum
/// and column, with an independent stratum permutation per column.
SampleMatrix lhs_unit_hypercube(std::size_t n, std::size_t m, RngSeed seed);

/// Componentwise inverse standard normal CDF.
SampleMatrix unit_to_standard_normal(const SampleMatrix& u);

/// Rows per independently seeded chunk of a Monte Carlo stream.
inline constexpr std::size_t kMcsChunkRows = 65536;

/// Rows [chunk*kMcsChunkRows, ...) of the standard-normal stream for `seed`,
/// `rows` of them. Chunks are independent, so any partition is reproducible.
SampleMatrix mcs_chunk(std::size_t chunk, std::size_t rows, std::size_t m, RngSeed seed);

/// n i.i.d. standard-normal points in m dimensions.
SampleMatrix mcs_pool(std::size_t n, std::size_t m, RngSeed seed);

}  // namespace relax
