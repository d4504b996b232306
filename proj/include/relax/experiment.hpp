#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "relax/acquisition.hpp"
#include "relax/gp.hpp"
#include "relax/lsf.hpp"
#include "relax/pareto.hpp"

namespace relax {

/// A relative beta-error target that must hold for S consecutive iterations.
struct TargetSpec {
    double target = 1e-2;
    std::size_t consecutive = 3;

    friend bool operator==(const TargetSpec&, const TargetSpec&) = default;
};

struct ExperimentConfig {
    LsfId lsf = LsfId::FourBranchK6;
    Strategy strategy = Strategy::MooR;
    std::size_t n_initial = 10;
    /// Active samples acquired after the initial design.
    std::size_t budget = 190;
    std::size_t pool_size = 100000;
    std::size_t mcs_size = 1000000;
    std::uint64_t base_seed = 1;
    std::size_t seed_count = 15;
    MooRConfig moor;
    EffConfig eff;
    GpOptions gp;
    std::size_t weight_grid = 1001;
    std::vector<TargetSpec> targets = {{1e-2, 3}, {5e-3, 3}, {1e-3, 3}};

    /// Throws ArgumentError on an inconsistent configuration.
    void validate() const;
};

struct PhaseTimes {
    double fit = 0.0;
    double mcs = 0.0;
    double pool = 0.0;
    double select = 0.0;
};

struct IterationRecord {
    std::size_t t = 0;
    /// Training-set size after this iteration's acquisition.
    std::size_t n_train = 0;
    double pf_hat = 0.0;
    double beta_hat = 0.0;
    double delta_beta = 0.0;
    Eigen::VectorXd selected_u;
    ObjectivePair selected_obj;
    std::size_t pareto_size = 0;
    double pareto_frac = 0.0;
    std::optional<double> gamma;
    std::optional<WeightInterval> weights;
    KernelParams params;
    std::vector<std::string> flags;

    // Diagnostics of the fitted model at its own training points.
    double interp_mu_error = 0.0;     ///< max |mu - y| / (1 + |y|)
    double interp_sigma_ratio = 0.0;  ///< max sigma / sqrt(sigma_f2)
    PhaseTimes times;
};

struct RunResult {
    ExperimentConfig config;
    std::uint64_t seed = 0;
    double reference_beta = 0.0;
    std::vector<IterationRecord> records;
    /// First-hit trace index per config target.
    std::vector<std::optional<std::size_t>> hits;
    bool truncated = false;
    std::string error;

    /// Total training samples at the first hit of target k (NotReached -> budget + N0 + 1).
    std::size_t hit_samples(std::size_t k) const;
};

/// Called after each completed iteration with the run seed and its record.
using RunObserver = std::function<void(std::uint64_t seed, const IterationRecord&)>;

/// One active-learning run.
RunResult run(const ExperimentConfig& config, std::uint64_t seed, const RunObserver& observer = {});

/// Run seed of sweep member k.
inline std::uint64_t sweep_seed(const ExperimentConfig& config, std::size_t k) {
    return config.base_seed + k;
}

/// seed_count independent runs with seeds base_seed, base_seed + 1, ...
std::vector<RunResult> sweep(const ExperimentConfig& config, const RunObserver& observer = {});

struct TargetSummary {
    TargetSpec target;
    double median = 0.0;
    double p2_5 = 0.0;
    double p97_5 = 0.0;
    std::size_t n_not_reached = 0;
    std::vector<std::size_t> samples;
};

/// Percentile with linear interpolation between order statistics.
double percentile(std::vector<double> values, double pct);

/// Statistics of the first-hit sample counts for config target k.
TargetSummary aggregate(const std::vector<RunResult>& results, std::size_t k);

}  // namespace relax
