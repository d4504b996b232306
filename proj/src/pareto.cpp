#include "relax/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "relax/errors.hpp"

namespace relax {

std::size_t ParetoSet::position_of(std::size_t pool_index) const {
    const auto it = std::lower_bound(indices.begin(), indices.end(), pool_index);
    return (it != indices.end() && *it == pool_index) ? static_cast<std::size_t>(it - indices.begin())
                                                       : indices.size();
}

std::vector<ObjectivePair> objectives(std::span<const GpPrediction> preds) {
    std::vector<ObjectivePair> out;
    out.reserve(preds.size());
    for (const GpPrediction& p : preds) {
        out.push_back({-std::fabs(p.mu), p.sigma});
    }
    return out;
}

std::vector<ObjectivePair> objectives(const PredictionBatch& preds) {
    std::vector<ObjectivePair> out(static_cast<std::size_t>(preds.mu.size()));
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        out[i] = {-std::fabs(preds.mu[k]), preds.sigma[k]};
    }
    return out;
}

namespace {

ObjectiveBounds bounds_of(const std::vector<ObjectivePair>& raw) {
    ObjectiveBounds b;
    b.f_mu_min = b.f_sigma_min = std::numeric_limits<double>::infinity();
    b.f_mu_max = b.f_sigma_max = -std::numeric_limits<double>::infinity();
    for (const ObjectivePair& p : raw) {
        b.f_mu_min = std::min(b.f_mu_min, p.f_mu);
        b.f_mu_max = std::max(b.f_mu_max, p.f_mu);
        b.f_sigma_min = std::min(b.f_sigma_min, p.f_sigma);
        b.f_sigma_max = std::max(b.f_sigma_max, p.f_sigma);
    }
    return b;
}

}  // namespace

ParetoSet extract_pareto(std::span<const ObjectivePair> pairs) {
    if (pairs.empty()) {
        throw ArgumentError("extract_pareto: empty candidate set");
    }
    for (const ObjectivePair& p : pairs) {
        if (!std::isfinite(p.f_mu) || !std::isfinite(p.f_sigma)) {
            throw ArgumentError("extract_pareto: non-finite objective value");
        }
    }

    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (pairs[a].f_mu != pairs[b].f_mu) return pairs[a].f_mu > pairs[b].f_mu;
        if (pairs[a].f_sigma != pairs[b].f_sigma) return pairs[a].f_sigma > pairs[b].f_sigma;
        return a < b;
    });

    // Every earlier point has f_mu >= the current one, so the current point
    // survives iff its f_sigma beats everything seen so far. Equality means an
    // earlier point dominates it or is an exact duplicate with a lower index.
    ParetoSet front;
    double best_sigma = -std::numeric_limits<double>::infinity();
    for (std::size_t idx : order) {
        if (pairs[idx].f_sigma > best_sigma) {
            best_sigma = pairs[idx].f_sigma;
            front.indices.push_back(idx);
        }
    }
    std::sort(front.indices.begin(), front.indices.end());

    front.raw.reserve(front.indices.size());
    for (std::size_t idx : front.indices) {
        front.raw.push_back(pairs[idx]);
    }
    front.bounds = bounds_of(front.raw);
    return front;
}

ParetoSet normalize(ParetoSet front) {
    front.bounds = bounds_of(front.raw);
    const ObjectiveBounds& b = front.bounds;
    const double mu_range = b.f_mu_max - b.f_mu_min;
    const double sigma_range = b.f_sigma_max - b.f_sigma_min;
    front.normalized.resize(front.raw.size());
    for (std::size_t i = 0; i < front.raw.size(); ++i) {
        const ObjectivePair& p = front.raw[i];
        front.normalized[i] = {mu_range > 0.0 ? (p.f_mu - b.f_mu_min) / mu_range : 0.5,
                               sigma_range > 0.0 ? (p.f_sigma - b.f_sigma_min) / sigma_range : 0.5};
    }
    return front;
}

}  // namespace relax
