#include "relax/gp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "relax/errors.hpp"
#include "relax/optim.hpp"
#include "relax/parallel.hpp"

namespace relax {

namespace {

constexpr double kSqrt3 = 1.7320508075688772935;
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr Eigen::Index kPredictChunk = 2048;

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& x) {
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double r = (x.row(i) - x.row(j)).norm();
            d(i, j) = r;
            d(j, i) = r;
        }
    }
    return d;
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& distances, const KernelParams& p) {
    const Eigen::ArrayXXd a = (kSqrt3 / p.ell) * distances.array();
    return (p.sigma_f2 * (1.0 + a) * (-a).exp()).matrix();
}

struct Factorization {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double jitter = 0.0;
};

// Cholesky of K + jitter I with jitter escalating by 10x from jitter_start to
// jitter_max, both relative to trace(K)/n.
Factorization factorize(const Eigen::MatrixXd& k, const GpOptions& options) {
    const double scale = k.trace() / static_cast<double>(k.rows());
    std::vector<double> tried;
    for (double rel = options.jitter_start; rel <= options.jitter_max * (1.0 + 1e-9); rel *= 10.0) {
        const double jitter = rel * scale;
        tried.push_back(jitter);
        Eigen::MatrixXd kj = k;
        kj.diagonal().array() += jitter;
        Factorization f{Eigen::LLT<Eigen::MatrixXd>(kj), jitter};
        if (f.llt.info() == Eigen::Success && (f.llt.matrixLLT().diagonal().array() > 0.0).all()) {
            return f;
        }
    }
    std::string levels;
    for (double j : tried) {
        levels += (levels.empty() ? "" : ", ") + std::to_string(j);
    }
    throw NumericalError("kernel matrix factorization failed at jitter levels [" + levels + "]", tried);
}

LmlResult lml_from_distances(const Eigen::MatrixXd& distances, const Eigen::VectorXd& resid,
                             const KernelParams& p, const GpOptions& options, bool with_gradient) {
    const Eigen::MatrixXd k = kernel_matrix(distances, p);
    const Factorization f = factorize(k, options);
    const Eigen::VectorXd alpha = f.llt.solve(resid);
    const double n = static_cast<double>(resid.size());
    const double log_det = 2.0 * f.llt.matrixLLT().diagonal().array().log().sum();

    LmlResult out;
    out.jitter = f.jitter;
    out.value = -0.5 * resid.dot(alpha) - 0.5 * log_det - 0.5 * n * kLog2Pi;
    if (with_gradient) {
        // dK/dlog(ell) = sf2 a^2 exp(-a); the jitter scales with sf2, so
        // d(K + jI)/dlog(sf2) = K + jI and that term reduces to (r'alpha - n)/2.
        const Eigen::ArrayXXd a = (kSqrt3 / p.ell) * distances.array();
        const Eigen::MatrixXd dk_dell = (p.sigma_f2 * a.square() * (-a).exp()).matrix();
        const Eigen::MatrixXd k_inv = f.llt.solve(Eigen::MatrixXd::Identity(k.rows(), k.cols()));
        out.grad_log[0] = 0.5 * alpha.dot(dk_dell * alpha) - 0.5 * k_inv.cwiseProduct(dk_dell).sum();
        out.grad_log[1] = 0.5 * (resid.dot(alpha) - n);
    }
    return out;
}

void check_training(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    if (x.rows() != y.size()) {
        throw ArgumentError("GP: training inputs and responses differ in length");
    }
    if (x.rows() < 2) {
        throw ArgumentError("GP: at least two training points are required");
    }
    if (!x.allFinite() || !y.allFinite()) {
        throw ArgumentError("GP: training data contain non-finite values");
    }
}

void check_params(const KernelParams& p) {
    if (!(p.sigma_f2 > 0.0) || !(p.ell > 0.0)) {
        throw ArgumentError("kernel parameters must be strictly positive");
    }
}

struct Standardized {
    double mean;
    double scale;
    Eigen::VectorXd y;
};

Standardized standardize(const Eigen::VectorXd& y) {
    const double mean = y.mean();
    if (y.maxCoeff() == y.minCoeff()) {
        throw DegenerateDataError("GP: all training responses are identical");
    }
    const double var = (y.array() - mean).square().sum() / static_cast<double>(y.size() - 1);
    const double scale = std::sqrt(var);
    return {mean, scale, (y.array() - mean) / scale};
}

}  // namespace

double kernel_at_distance(double r, const KernelParams& params) {
    const double a = kSqrt3 * r / params.ell;
    return params.sigma_f2 * (1.0 + a) * std::exp(-a);
}

double kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& x2, const KernelParams& params) {
    if (x.size() != x2.size()) {
        throw ArgumentError("kernel: dimension mismatch");
    }
    return kernel_at_distance((x - x2).norm(), params);
}

double log_marginal_likelihood(const Eigen::MatrixXd& train_x, const Eigen::VectorXd& train_y,
                               double mean_const, const KernelParams& params,
                               const GpOptions& options) {
    check_training(train_x, train_y);
    check_params(params);
    const Eigen::VectorXd resid = train_y.array() - mean_const;
    return lml_from_distances(pairwise_distances(train_x), resid, params, options, false).value;
}

LmlResult log_marginal_likelihood_with_gradient(const Eigen::MatrixXd& train_x,
                                                const Eigen::VectorXd& train_y, double mean_const,
                                                const KernelParams& params, const GpOptions& options) {
    check_training(train_x, train_y);
    check_params(params);
    const Eigen::VectorXd resid = train_y.array() - mean_const;
    return lml_from_distances(pairwise_distances(train_x), resid, params, options, true);
}

GpModel make_model(const Eigen::MatrixXd& train_x, const Eigen::VectorXd& train_y,
                   const KernelParams& standardized, const GpOptions& options) {
    check_training(train_x, train_y);
    check_params(standardized);
    const Standardized s = standardize(train_y);

    GpModel model;
    model.train_x_ = train_x;
    model.train_y_ = train_y;
    model.mean_const_ = s.mean;
    model.y_scale_ = s.scale;
    model.standardized_ = standardized;

    const Eigen::MatrixXd distances = pairwise_distances(train_x);
    const Factorization f = factorize(kernel_matrix(distances, standardized), options);
    model.factor_ = f.llt.matrixL();
    model.jitter_ = f.jitter;
    model.alpha_ = f.llt.solve(s.y);
    const double log_det = 2.0 * model.factor_.diagonal().array().log().sum();
    model.lml_ = -0.5 * s.y.dot(model.alpha_) - 0.5 * log_det -
                 0.5 * static_cast<double>(s.y.size()) * kLog2Pi;
    return model;
}

GpModel fit(const Eigen::MatrixXd& train_x, const Eigen::VectorXd& train_y, const GpOptions& options) {
    check_training(train_x, train_y);
    const Standardized s = standardize(train_y);
    const Eigen::MatrixXd distances = pairwise_distances(train_x);

    const Eigen::Vector2d lower(options.log_ell_min, options.log_sf2_min);
    const Eigen::Vector2d upper(options.log_ell_max, options.log_sf2_max);

    // Start 0 at the unit point; the rest from a scrambled Latin grid over the box.
    std::vector<Eigen::VectorXd> starts;
    starts.emplace_back(Eigen::Vector2d(0.0, 0.0).cwiseMax(lower).cwiseMin(upper));
    constexpr int kScramble[] = {2, 0, 3, 1};
    const int extra = std::max(0, options.restarts - 1);
    for (int i = 0; i < extra; ++i) {
        const double fe = (i + 0.5) / extra;
        const double fs = (kScramble[i % 4] + 0.5 + 4 * (i / 4)) / std::max(extra, 4);
        starts.emplace_back(Eigen::Vector2d(lower[0] + fe * (upper[0] - lower[0]),
                                            lower[1] + std::min(fs, 1.0) * (upper[1] - lower[1])));
    }

    BoxObjective objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
        const KernelParams p{std::exp(theta[1]), std::exp(theta[0])};
        const LmlResult r = lml_from_distances(distances, s.y, p, options, true);
        grad = -r.grad_log;
        return -r.value;
    };

    BoxOptions box;
    box.max_iterations = options.max_iterations;

    std::optional<BoxResult> best;
    std::optional<NumericalError> last_error;
    for (const Eigen::VectorXd& start : starts) {
        try {
            BoxResult r = minimize_box(objective, start, lower, upper, box);
            // Strict improvement only: the lowest restart index wins ties.
            if (!best || r.f < best->f) {
                best = std::move(r);
            }
        } catch (const NumericalError& e) {
            last_error = e;
        }
    }
    if (!best) {
        throw *last_error;
    }

    GpModel model = make_model(train_x, train_y, KernelParams{std::exp(best->x[1]), std::exp(best->x[0])},
                               options);
    model.warning_ = !best->converged;
    return model;
}

namespace {

constexpr Eigen::Index kBlock = 256;

// Fills the leading columns of buf with k(train_i, query_j) for a block of queries.
void kernel_block(const Eigen::MatrixXd& train, const Eigen::MatrixXd& queries, Eigen::Index begin,
                  Eigen::Index count, const KernelParams& p, Eigen::ArrayXXd& buf) {
    const double c = kSqrt3 / p.ell;
    for (Eigen::Index j = 0; j < count; ++j) {
        auto col = buf.col(j);
        col = (train.col(0).array() - queries(begin + j, 0)).square();
        for (Eigen::Index d = 1; d < train.cols(); ++d) {
            col += (train.col(d).array() - queries(begin + j, d)).square();
        }
        col = c * col.sqrt();
    }
    auto a = buf.leftCols(count);
    a = p.sigma_f2 * (1.0 + a) * (-a).exp();
}

void check_queries(const GpModel& model, const Eigen::MatrixXd& x_star) {
    if (static_cast<std::size_t>(x_star.cols()) != model.dim()) {
        throw ArgumentError("predict: query dimension " + std::to_string(x_star.cols()) +
                            " does not match model dimension " + std::to_string(model.dim()));
    }
}

}  // namespace

PredictionBatch predict_batch(const GpModel& model, const Eigen::MatrixXd& x_star) {
    check_queries(model, x_star);
    const Eigen::Index q = x_star.rows();
    const KernelParams& p = model.standardized_params();
    PredictionBatch out{Eigen::VectorXd(q), Eigen::VectorXd(q)};
    const auto lower = model.factor().triangularView<Eigen::Lower>();

    const std::size_t chunks = static_cast<std::size_t>((q + kPredictChunk - 1) / kPredictChunk);
    parallel_for_chunks(chunks, [&](std::size_t c) {
        const Eigen::Index chunk_begin = static_cast<Eigen::Index>(c) * kPredictChunk;
        const Eigen::Index chunk_end = std::min(chunk_begin + kPredictChunk, q);
        Eigen::ArrayXXd buf(model.train_x().rows(), kBlock);
        for (Eigen::Index begin = chunk_begin; begin < chunk_end; begin += kBlock) {
            const Eigen::Index count = std::min(kBlock, chunk_end - begin);
            kernel_block(model.train_x(), x_star, begin, count, p, buf);
            auto ks = buf.leftCols(count).matrix();
            const Eigen::VectorXd mu_std = ks.transpose() * model.alpha();
            lower.solveInPlace(ks);
            const Eigen::ArrayXd var_std =
                (p.sigma_f2 - ks.colwise().squaredNorm().transpose().array()).max(0.0);
            out.mu.segment(begin, count) = (model.mean_const() + model.y_scale() * mu_std.array()).matrix();
            out.sigma.segment(begin, count) = (model.y_scale() * var_std.sqrt()).matrix();
        }
    });
    return out;
}

std::vector<GpPrediction> predict(const GpModel& model, const Eigen::MatrixXd& x_star) {
    const PredictionBatch batch = predict_batch(model, x_star);
    std::vector<GpPrediction> out(static_cast<std::size_t>(batch.mu.size()));
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = {batch.mu[static_cast<Eigen::Index>(i)], batch.sigma[static_cast<Eigen::Index>(i)]};
    }
    return out;
}

Eigen::VectorXd predict_mean(const GpModel& model, const Eigen::MatrixXd& x_star) {
    check_queries(model, x_star);
    const Eigen::Index q = x_star.rows();
    const KernelParams& p = model.standardized_params();
    Eigen::VectorXd out(q);
    const std::size_t chunks = static_cast<std::size_t>((q + kPredictChunk - 1) / kPredictChunk);
    parallel_for_chunks(chunks, [&](std::size_t c) {
        const Eigen::Index chunk_begin = static_cast<Eigen::Index>(c) * kPredictChunk;
        const Eigen::Index chunk_end = std::min(chunk_begin + kPredictChunk, q);
        Eigen::ArrayXXd buf(model.train_x().rows(), kBlock);
        for (Eigen::Index begin = chunk_begin; begin < chunk_end; begin += kBlock) {
            const Eigen::Index count = std::min(kBlock, chunk_end - begin);
            kernel_block(model.train_x(), x_star, begin, count, p, buf);
            out.segment(begin, count) =
                (model.mean_const() +
                 model.y_scale() * (buf.leftCols(count).matrix().transpose() * model.alpha()).array())
                    .matrix();
        }
    });
    return out;
}

}  // namespace relax
