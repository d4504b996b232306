#include "relax/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "relax/errors.hpp"
#include "relax/normal.hpp"

namespace relax {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

RngSeed derive_seed(RngSeed base, Stream stream, std::uint64_t counter) {
    std::uint64_t h = splitmix64(base.value);
    h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
    h = splitmix64(h ^ counter);
    return RngSeed{h};
}

std::uint64_t Rng::below(std::uint64_t n) {
    // Rejection sampling over the largest multiple of n.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

double Rng::normal() {
    return normal_quantile(uniform_open());
}

SampleMatrix lhs_unit_hypercube(std::size_t n, std::size_t m, RngSeed seed) {
    if (n == 0 || m == 0) {
        throw ArgumentError("lhs_unit_hypercube: n and m must be positive");
    }
    Rng rng(seed);
    SampleMatrix out(n, m);
    std::vector<std::size_t> strata(n);
    const double width = 1.0 / static_cast<double>(n);
    for (std::size_t col = 0; col < m; ++col) {
        std::iota(strata.begin(), strata.end(), std::size_t{0});
        for (std::size_t i = n; i > 1; --i) {
            std::swap(strata[i - 1], strata[rng.below(i)]);
        }
        for (std::size_t row = 0; row < n; ++row) {
            const double v = (static_cast<double>(strata[row]) + rng.uniform_open()) * width;
            // Rounding can land exactly on the upper stratum edge when n is large.
            out(row, col) = std::min(v, std::nextafter(1.0, 0.0));
        }
    }
    return out;
}

SampleMatrix unit_to_standard_normal(const SampleMatrix& u) {
    SampleMatrix out(u.rows(), u.cols());
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
        for (Eigen::Index j = 0; j < u.cols(); ++j) {
            const double v = u(i, j);
            if (!(v > 0.0 && v < 1.0)) {
                throw ArgumentError("unit_to_standard_normal: entries must lie strictly inside (0, 1)");
            }
            out(i, j) = normal_quantile(v);
        }
    }
    return out;
}

SampleMatrix mcs_chunk(std::size_t chunk, std::size_t rows, std::size_t m, RngSeed seed) {
    Rng rng(derive_seed(seed, Stream::Chunk, chunk));
    SampleMatrix out(rows, m);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            out(i, j) = rng.normal();
        }
    }
    return out;
}

SampleMatrix mcs_pool(std::size_t n, std::size_t m, RngSeed seed) {
    if (n == 0 || m == 0) {
        throw ArgumentError("mcs_pool: n and m must be positive");
    }
    SampleMatrix out(n, m);
    for (std::size_t start = 0, chunk = 0; start < n; start += kMcsChunkRows, ++chunk) {
        const std::size_t rows = std::min(kMcsChunkRows, n - start);
        out.middleRows(start, rows) = mcs_chunk(chunk, rows, m, seed);
    }
    return out;
}

}  // namespace relax
