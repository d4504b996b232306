#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "relax/gp.hpp"

namespace relax {

/// Bi-objective image of a candidate, both maximized:
/// f_mu = -|mu| (exploitation), f_sigma = sigma (exploration).
struct ObjectivePair {
    double f_mu = 0.0;
    double f_sigma = 0.0;

    friend bool operator==(const ObjectivePair&, const ObjectivePair&) = default;
};

struct ObjectiveBounds {
    double f_mu_min = 0.0;
    double f_mu_max = 0.0;
    double f_sigma_min = 0.0;
    double f_sigma_max = 0.0;
};

/// Non-dominated candidates. Members are ordered by ascending pool index;
/// raw, normalized and indices are parallel arrays.
struct ParetoSet {
    std::vector<std::size_t> indices;
    std::vector<ObjectivePair> raw;
    std::vector<ObjectivePair> normalized;
    ObjectiveBounds bounds;

    std::size_t size() const { return indices.size(); }
    /// Position of a pool index within the front, or size() if absent.
    std::size_t position_of(std::size_t pool_index) const;
};

std::vector<ObjectivePair> objectives(std::span<const GpPrediction> preds);
std::vector<ObjectivePair> objectives(const PredictionBatch& preds);

/// a dominates b: at least as good in both objectives, strictly better in one.
inline bool dominates(const ObjectivePair& a, const ObjectivePair& b) {
    return a.f_mu >= b.f_mu && a.f_sigma >= b.f_sigma && (a.f_mu > b.f_mu || a.f_sigma > b.f_sigma);
}

/// Maximal elements by sort-and-sweep, O(n log n). Exact duplicates keep the
/// lowest pool index. The result carries raw values and bounds; call
/// normalize() to fill the normalized coordinates.
ParetoSet extract_pareto(std::span<const ObjectivePair> pairs);

/// Min-max rescaling of each objective over the front; an objective that is
/// constant across the front maps to 0.5.
ParetoSet normalize(ParetoSet front);

}  // namespace relax
