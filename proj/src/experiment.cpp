#include "relax/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "relax/errors.hpp"
#include "relax/reliability.hpp"
#include "relax/sampling.hpp"

namespace relax {

void ExperimentConfig::validate() const {
    if (n_initial < 2) throw ArgumentError("config: n_initial must be at least 2");
    if (budget < 1) throw ArgumentError("config: budget must be at least 1");
    if (pool_size < 2) throw ArgumentError("config: pool_size must be at least 2");
    if (mcs_size < 1) throw ArgumentError("config: mcs_size must be positive");
    if (seed_count < 1) throw ArgumentError("config: seed_count must be positive");
    if (weight_grid < 2) throw ArgumentError("config: weight_grid must be at least 2");
    if (!(eff.c > 0.0)) throw ArgumentError("config: eff.c must be positive");
    if (!(moor.gamma_max > 0.0 && moor.gamma_max <= 1.0)) {
        throw ArgumentError("config: moor.gamma_max must lie in (0, 1]");
    }
    if (!(moor.lambda > 0.0)) throw ArgumentError("config: moor.lambda must be positive");
    if (!(moor.delta_p0 > 0.0)) throw ArgumentError("config: moor.delta_p0 must be positive");
    if (moor.window < 1) throw ArgumentError("config: moor.window must be at least 1");
    if (gp.restarts < 1) throw ArgumentError("config: gp.restarts must be at least 1");
    for (const TargetSpec& t : targets) {
        if (!(t.target > 0.0) || t.consecutive < 1) {
            throw ArgumentError("config: targets need a positive threshold and S >= 1");
        }
    }
}

std::size_t RunResult::hit_samples(std::size_t k) const {
    return hit_sample_count(hits.at(k), config.n_initial, config.budget);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double evaluate_row(LsfId id, const Eigen::VectorXd& u) {
    return evaluate_standard(id, std::span<const double>(u.data(), static_cast<std::size_t>(u.size())));
}

bool is_duplicate(const Eigen::MatrixXd& train_x, const Eigen::VectorXd& candidate) {
    for (Eigen::Index i = 0; i < train_x.rows(); ++i) {
        if ((train_x.row(i).transpose() - candidate).norm() <= 1e-12) {
            return true;
        }
    }
    return false;
}

void append_point(Eigen::MatrixXd& x, Eigen::VectorXd& y, const Eigen::VectorXd& u, double g) {
    x.conservativeResize(x.rows() + 1, Eigen::NoChange);
    x.row(x.rows() - 1) = u.transpose();
    y.conservativeResize(y.size() + 1);
    y[y.size() - 1] = g;
}

// One LHS point mapped to standard-normal space.
Eigen::VectorXd retry_point(std::size_t m, RngSeed run_seed, std::size_t t) {
    const SampleMatrix u = unit_to_standard_normal(
        lhs_unit_hypercube(1, m, derive_seed(run_seed, Stream::RetryDesign, t)));
    return u.row(0).transpose();
}

}  // namespace

RunResult run(const ExperimentConfig& config, std::uint64_t seed, const RunObserver& observer) {
    config.validate();
    const LsfDefinition& def = definition(config.lsf);
    const std::size_t m = def.dim;
    const RngSeed run_seed{seed};

    RunResult result;
    result.config = config;
    result.seed = seed;
    result.reference_beta = reference(config.lsf).beta;

    Eigen::MatrixXd train_x =
        unit_to_standard_normal(lhs_unit_hypercube(config.n_initial, m, derive_seed(run_seed, Stream::InitialDesign, 0)));
    Eigen::VectorXd train_y(train_x.rows());
    for (Eigen::Index i = 0; i < train_x.rows(); ++i) {
        train_y[i] = evaluate_row(config.lsf, train_x.row(i).transpose());
    }

    MooRState state(config.moor.window);
    bool retried = false;

    for (std::size_t t = 1; t <= config.budget; ++t) {
        IterationRecord rec;
        rec.t = t;

        auto phase = Clock::now();
        std::optional<GpModel> model;
        try {
            try {
                model = fit(train_x, train_y, config.gp);
            } catch (const DegenerateDataError&) {
                if (retried) throw;
                retried = true;
                const Eigen::VectorXd extra = retry_point(m, run_seed, t);
                append_point(train_x, train_y, extra, evaluate_row(config.lsf, extra));
                rec.flags.emplace_back("retry-point");
                model = fit(train_x, train_y, config.gp);
            }
        } catch (const std::exception& e) {
            result.truncated = true;
            result.error = "iteration " + std::to_string(t) + ": " + e.what();
            break;
        }
        rec.times.fit = seconds_since(phase);
        rec.params = model->params();
        if (model->optimizer_warning()) rec.flags.emplace_back("gp-warning");

        const PredictionBatch at_train = predict_batch(*model, train_x);
        const double sf = std::sqrt(rec.params.sigma_f2);
        for (Eigen::Index i = 0; i < train_x.rows(); ++i) {
            rec.interp_mu_error = std::max(rec.interp_mu_error,
                                           std::fabs(at_train.mu[i] - train_y[i]) / (1.0 + std::fabs(train_y[i])));
            rec.interp_sigma_ratio = std::max(rec.interp_sigma_ratio, at_train.sigma[i] / sf);
        }

        phase = Clock::now();
        const ReliabilityEstimate est =
            estimate_pf(*model, config.mcs_size, m, derive_seed(run_seed, Stream::ReliabilityMcs, t));
        rec.times.mcs = seconds_since(phase);
        rec.pf_hat = est.p_f_hat;
        rec.beta_hat = est.beta_hat;
        rec.delta_beta = delta_beta(est.beta_hat, result.reference_beta);
        if (est.clamped) rec.flags.emplace_back("pf-clamped");
        state.push(est.p_f_hat);

        phase = Clock::now();
        const SampleMatrix pool = mcs_pool(config.pool_size, m, derive_seed(run_seed, Stream::CandidatePool, t));
        const std::vector<GpPrediction> preds = predict(*model, pool);
        rec.times.pool = seconds_since(phase);

        phase = Clock::now();
        const std::vector<ObjectivePair> objs = objectives(preds);
        const ParetoSet front = normalize(extract_pareto(objs));
        rec.pareto_size = front.size();
        rec.pareto_frac = static_cast<double>(front.size()) / static_cast<double>(config.pool_size);

        std::size_t chosen = 0;
        try {
            switch (config.strategy) {
                case Strategy::U: chosen = select_u(preds); break;
                case Strategy::Eff: chosen = select_eff(preds, config.eff); break;
                case Strategy::MooK: chosen = select_knee(front); break;
                case Strategy::MooC: chosen = select_compromise(front); break;
                case Strategy::MooR: chosen = select_moor(front, state, config.moor); break;
            }
            if (is_duplicate(train_x, pool.row(chosen).transpose())) {
                rec.flags.emplace_back("duplicate-skip");
                const std::vector<std::size_t> order =
                    preference_order(config.strategy, preds, front, state, config.eff, config.moor);
                const auto it = std::find_if(order.begin(), order.end(), [&](std::size_t idx) {
                    return !is_duplicate(train_x, pool.row(idx).transpose());
                });
                if (it == order.end()) {
                    throw DegeneratePoolError("every candidate duplicates a training input");
                }
                chosen = *it;
            }
        } catch (const std::exception& e) {
            result.truncated = true;
            result.error = "iteration " + std::to_string(t) + ": " + e.what();
            break;
        }

        if (config.strategy == Strategy::MooR) {
            rec.gamma = moor_gamma(state, config.moor);
            if (!rec.gamma) rec.flags.emplace_back("moor-explore");
        }
        if (front.position_of(chosen) < front.size()) {
            rec.weights = weight_interval(front, chosen, config.weight_grid);
            if (rec.weights->never_selected) rec.flags.emplace_back("never-selected");
        } else {
            rec.flags.emplace_back("off-front");
        }
        rec.times.select = seconds_since(phase);

        rec.selected_u = pool.row(chosen).transpose();
        rec.selected_obj = objs[chosen];
        append_point(train_x, train_y, rec.selected_u, evaluate_row(config.lsf, rec.selected_u));
        rec.n_train = static_cast<std::size_t>(train_x.rows());
        if (observer) observer(seed, rec);
        result.records.push_back(std::move(rec));
    }

    std::vector<double> trace;
    trace.reserve(result.records.size());
    for (const IterationRecord& r : result.records) trace.push_back(r.delta_beta);
    for (const TargetSpec& target : config.targets) {
        result.hits.push_back(first_target_hit(trace, target.target, target.consecutive));
    }
    return result;
}

std::vector<RunResult> sweep(const ExperimentConfig& config, const RunObserver& observer) {
    config.validate();
    std::vector<RunResult> results;
    results.reserve(config.seed_count);
    for (std::size_t k = 0; k < config.seed_count; ++k) {
        const std::uint64_t seed = sweep_seed(config, k);
        try {
            results.push_back(run(config, seed, observer));
        } catch (const std::exception& e) {
            RunResult failed;
            failed.config = config;
            failed.seed = seed;
            failed.reference_beta = reference(config.lsf).beta;
            failed.truncated = true;
            failed.error = e.what();
            failed.hits.assign(config.targets.size(), std::nullopt);
            results.push_back(std::move(failed));
        }
    }
    return results;
}

double percentile(std::vector<double> values, double pct) {
    if (values.empty()) {
        throw ArgumentError("percentile: empty sample");
    }
    std::sort(values.begin(), values.end());
    const double pos = pct / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

TargetSummary aggregate(const std::vector<RunResult>& results, std::size_t k) {
    if (results.empty()) {
        throw ArgumentError("aggregate: no runs");
    }
    TargetSummary out;
    out.target = results.front().config.targets.at(k);
    std::vector<double> values;
    for (const RunResult& r : results) {
        const std::size_t s = r.hit_samples(k);
        if (!r.hits.at(k)) ++out.n_not_reached;
        out.samples.push_back(s);
        values.push_back(static_cast<double>(s));
    }
    out.median = percentile(values, 50.0);
    out.p2_5 = percentile(values, 2.5);
    out.p97_5 = percentile(values, 97.5);
    return out;
}

}  // namespace relax
