#include "relax/reliability.hpp"

#include <algorithm>
#include <cmath>

#include "relax/errors.hpp"
#include "relax/normal.hpp"
#include "relax/parallel.hpp"

namespace relax {

double ReliabilityEstimate::std_error() const {
    if (n_mcs == 0) {
        return 0.0;
    }
    return std::sqrt(p_f_hat * (1.0 - p_f_hat) / static_cast<double>(n_mcs));
}

BetaEstimate beta_from_pf(double p_f, std::size_t n_mcs) {
    if (!(p_f >= 0.0 && p_f <= 1.0)) {
        throw ArgumentError("beta_from_pf: probability outside [0, 1]");
    }
    const double floor = 1.0 / (2.0 * static_cast<double>(std::max<std::size_t>(n_mcs, 1)));
    BetaEstimate out;
    double p = p_f;
    if (p <= 0.0) {
        p = floor;
        out.clamped = true;
    } else if (p >= 1.0) {
        p = 1.0 - floor;
        out.clamped = true;
    }
    out.beta = -normal_quantile(p);
    return out;
}

namespace {

template <typename CountChunk>
ReliabilityEstimate count_failures(std::size_t n_mcs, std::size_t m, RngSeed seed, bool parallel,
                                   CountChunk&& count_chunk) {
    if (n_mcs == 0 || m == 0) {
        throw ArgumentError("estimate_pf: sample count and dimension must be positive");
    }
    const std::size_t chunks = (n_mcs + kMcsChunkRows - 1) / kMcsChunkRows;
    std::vector<std::size_t> per_chunk(chunks, 0);
    auto body = [&](std::size_t c) {
        const std::size_t rows = std::min(kMcsChunkRows, n_mcs - c * kMcsChunkRows);
        per_chunk[c] = count_chunk(mcs_chunk(c, rows, m, seed));
    };
    if (parallel) {
        parallel_for_chunks(chunks, body);
    } else {
        for (std::size_t c = 0; c < chunks; ++c) body(c);
    }

    ReliabilityEstimate est;
    est.n_mcs = n_mcs;
    est.seed = seed;
    for (std::size_t f : per_chunk) est.failures += f;
    est.p_f_hat = static_cast<double>(est.failures) / static_cast<double>(n_mcs);
    const BetaEstimate b = beta_from_pf(est.p_f_hat, n_mcs);
    est.beta_hat = b.beta;
    est.clamped = b.clamped;
    return est;
}

}  // namespace

ReliabilityEstimate estimate_pf(const GpModel& model, std::size_t n_mcs, std::size_t m, RngSeed seed) {
    if (m != model.dim()) {
        throw ArgumentError("estimate_pf: dimension does not match the model");
    }
    // predict_mean parallelizes internally, so the chunk loop stays serial.
    return count_failures(n_mcs, m, seed, false, [&](const SampleMatrix& x) {
        const Eigen::VectorXd mu = predict_mean(model, x);
        return static_cast<std::size_t>((mu.array() <= 0.0).count());
    });
}

ReliabilityEstimate estimate_pf_direct(LsfId id, std::size_t n_mcs, RngSeed seed) {
    const std::size_t m = definition(id).dim;
    return count_failures(n_mcs, m, seed, true, [&](const SampleMatrix& u) {
        std::size_t failures = 0;
        Eigen::VectorXd row(u.cols());
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            row = u.row(i).transpose();
            if (evaluate_standard(id, std::span<const double>(row.data(), m)) <= 0.0) {
                ++failures;
            }
        }
        return failures;
    });
}

double delta_beta(double beta_hat, double beta_ref) {
    if (!(beta_ref > 0.0)) {
        throw ArgumentError("delta_beta: reference beta must be positive");
    }
    return std::fabs(beta_hat - beta_ref) / beta_ref;
}

std::optional<std::size_t> first_target_hit(std::span<const double> delta_beta, double target,
                                            std::size_t consecutive) {
    if (consecutive == 0) {
        throw ArgumentError("first_target_hit: S must be at least 1");
    }
    std::size_t run = 0;
    for (std::size_t i = 0; i < delta_beta.size(); ++i) {
        run = delta_beta[i] < target ? run + 1 : 0;
        if (run == consecutive) {
            return i + 1 - consecutive;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> first_target_hit(const ConvergenceTrace& trace) {
    return first_target_hit(trace.delta_beta, trace.target, trace.consecutive);
}

std::size_t hit_sample_count(std::optional<std::size_t> hit, std::size_t n_initial, std::size_t budget) {
    return hit ? n_initial + *hit : budget + n_initial + 1;
}

}  // namespace relax

namespace relax {

ReferenceCheck reference_check(LsfId id, std::size_t n, std::size_t reps, RngSeed seed) {
    if (n == 0 || reps == 0) {
        throw ArgumentError("reference_check: n and reps must be positive");
    }
    ReferenceCheck out;
    out.id = id;
    out.n = n;
    out.reps = reps;
    out.stored = reference(id);
    double sum = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
        sum += estimate_pf_direct(id, n, derive_seed(seed, Stream::ReliabilityMcs, r)).p_f_hat;
    }
    out.mean_pf = sum / static_cast<double>(reps);
    out.beta = beta_from_pf(out.mean_pf, n * reps).beta;
    const double total = static_cast<double>(n) * static_cast<double>(reps);
    out.std_error = std::sqrt(out.mean_pf * (1.0 - out.mean_pf) / total);
    const double ref_se = std::sqrt(out.stored.p_f * (1.0 - out.stored.p_f) / 1e9);
    out.combined_se = std::hypot(out.std_error, ref_se);
    out.rel_deviation = (out.mean_pf - out.stored.p_f) / out.stored.p_f;
    out.z = out.combined_se > 0.0 ? (out.mean_pf - out.stored.p_f) / out.combined_se : 0.0;
    return out;
}

}  // namespace relax
