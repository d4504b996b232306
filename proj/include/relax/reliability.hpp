#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "relax/gp.hpp"
#include "relax/lsf.hpp"
#include "relax/sampling.hpp"

namespace relax {

struct ReliabilityEstimate {
    double p_f_hat = 0.0;
    double beta_hat = 0.0;
    std::size_t failures = 0;
    std::size_t n_mcs = 0;
    RngSeed seed;
    /// beta_hat was computed from a clamped probability (zero or one failures fraction).
    bool clamped = false;

    /// Binomial standard error of p_f_hat.
    double std_error() const;
};

struct BetaEstimate {
    double beta = 0.0;
    bool clamped = false;
};

/// -Phi^-1(p_f), with p_f = 0 and 1 clamped to 1/(2n) and 1 - 1/(2n).
BetaEstimate beta_from_pf(double p_f, std::size_t n_mcs = 1000000);

/// Fraction of n_mcs standard-normal draws whose predictive mean is <= 0.
/// Streams the draws in independently seeded chunks, so memory stays bounded.
ReliabilityEstimate estimate_pf(const GpModel& model, std::size_t n_mcs, std::size_t m, RngSeed seed);

/// Crude Monte Carlo on the true limit-state function with the same draws.
ReliabilityEstimate estimate_pf_direct(LsfId id, std::size_t n_mcs, RngSeed seed);

/// |beta_hat - beta_ref| / beta_ref.
double delta_beta(double beta_hat, double beta_ref);

struct ConvergenceTrace {
    std::vector<double> delta_beta;
    double target = 1e-2;
    std::size_t consecutive = 3;
};

/// Smallest index t with delta_beta[i] < target for i = t .. t+S-1.
std::optional<std::size_t> first_target_hit(std::span<const double> delta_beta, double target,
                                            std::size_t consecutive);
std::optional<std::size_t> first_target_hit(const ConvergenceTrace& trace);

/// Total training samples at a hit index, with not-reached mapped to budget + n_initial + 1.
std::size_t hit_sample_count(std::optional<std::size_t> hit, std::size_t n_initial, std::size_t budget);

}  // namespace relax

namespace relax {

/// Independent recomputation of a benchmark's reference failure probability.
struct ReferenceCheck {
    LsfId id{};
    std::size_t n = 0;
    std::size_t reps = 0;
    double mean_pf = 0.0;
    double beta = 0.0;
    /// Binomial standard error of the mean over all n * reps draws.
    double std_error = 0.0;
    ReferenceReliability stored{};
    double rel_deviation = 0.0;
    /// sqrt(SE_estimate^2 + SE_reference^2); the stored values come from 10 x 1e8 draws.
    double combined_se = 0.0;
    /// (mean_pf - stored.p_f) / combined_se
    double z = 0.0;
};

/// Mean of `reps` crude Monte Carlo estimates of n draws each.
ReferenceCheck reference_check(LsfId id, std::size_t n, std::size_t reps, RngSeed seed);

}  // namespace relax
