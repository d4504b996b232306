#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "relax/acquisition.hpp"
#include "relax/normal.hpp"
#include "relax/pareto.hpp"
#include "relax/sampling.hpp"

namespace relax::testing {

// O(n^2) non-dominated set; among exact duplicates only the lowest index survives.
inline std::vector<std::size_t> brute_force_front(const std::vector<ObjectivePair>& pairs) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        bool keep = true;
        for (std::size_t j = 0; j < pairs.size() && keep; ++j) {
            if (j == i) continue;
            if (dominates(pairs[j], pairs[i])) keep = false;
            if (j < i && pairs[j] == pairs[i]) keep = false;
        }
        if (keep) out.push_back(i);
    }
    return out;
}

// Random prediction pool. Some pools are drawn on a coarse lattice to force ties and duplicates.
inline std::vector<GpPrediction> random_predictions(std::size_t n, std::uint64_t seed) {
    Rng rng(RngSeed{seed});
    const bool lattice = seed % 3 == 0;
    std::vector<GpPrediction> preds(n);
    for (GpPrediction& p : preds) {
        if (lattice) {
            p.mu = static_cast<double>(rng.below(21)) * 0.25 - 2.5;
            p.sigma = 0.1 + static_cast<double>(rng.below(11)) * 0.1;
        } else {
            p.mu = 2.0 * rng.normal();
            p.sigma = std::exp(0.7 * rng.normal() - 1.0);
        }
    }
    return preds;
}

// Integral of (eps - |y|) times the predictive density over [-eps, eps], split at the kink.
inline double eff_quadrature(double mu, double sigma, double c) {
    const double eps = c * sigma;
    auto f = [&](double y) { return (eps - std::fabs(y)) * normal_pdf((y - mu) / sigma) / sigma; };
    using Gk = boost::math::quadrature::gauss_kronrod<double, 61>;
    return Gk::integrate(f, -eps, 0.0, 12, 1e-12) + Gk::integrate(f, 0.0, eps, 12, 1e-12);
}

// Random mutually non-dominated front in raw objective space.
inline std::vector<ObjectivePair> random_front(std::size_t k, std::uint64_t seed) {
    Rng rng(RngSeed{seed});
    std::vector<double> a(k), b(k);
    for (std::size_t i = 0; i < k; ++i) {
        a[i] = -3.0 * rng.uniform_open();
        b[i] = 2.0 * rng.uniform_open();
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end(), std::greater<>());
    std::vector<ObjectivePair> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = {a[i], b[i]};
    // Shuffle so pool order is unrelated to the front order.
    for (std::size_t i = k; i > 1; --i) std::swap(out[i - 1], out[rng.below(i)]);
    return out;
}

// Point-to-line distance through the cross product of the extreme-to-extreme direction.
inline double cross_product_distance(ObjectivePair p, ObjectivePair a, ObjectivePair b) {
    const double dx = b.f_mu - a.f_mu, dy = b.f_sigma - a.f_sigma;
    const double cross = dx * (p.f_sigma - a.f_sigma) - dy * (p.f_mu - a.f_mu);
    return std::fabs(cross) / std::hypot(dx, dy);
}

}  // namespace relax::testing
