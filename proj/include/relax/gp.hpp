#pragma once

#include <vector>

#include <Eigen/Dense>

namespace relax {

/// Matérn-3/2 hyperparameters: process variance and one shared length-scale.
struct KernelParams {
    double sigma_f2 = 1.0;
    double ell = 1.0;
};

/// Matérn-3/2 covariance at Euclidean distance r.
double kernel_at_distance(double r, const KernelParams& params);

/// Matérn-3/2 covariance between two points.
double kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& x2, const KernelParams& params);

/// Bounds, restarts and conditioning policy. Bounds apply to the
/// standardized response scale.
struct GpOptions {
    double log_ell_min = -4.605170185988091;   // log 1e-2
    double log_ell_max = 4.605170185988091;    // log 1e2
    double log_sf2_min = -9.210340371976182;   // log 1e-4
    double log_sf2_max = 13.815510557964274;   // log 1e6
    int restarts = 5;
    double jitter_start = 1e-12;  // relative to trace(K)/n
    double jitter_max = 1e-4;
    int max_iterations = 200;
};

struct LmlResult {
    double value = 0.0;
    /// d/d(log ell), d/d(log sigma_f2).
    Eigen::Vector2d grad_log = Eigen::Vector2d::Zero();
    double jitter = 0.0;
};

/// -1/2 r'K^-1 r - 1/2 log|K| - n/2 log 2pi with r = y - mean_const and
/// K the kernel matrix plus escalating jitter.
double log_marginal_likelihood(const Eigen::MatrixXd& train_x, const Eigen::VectorXd& train_y,
                               double mean_const, const KernelParams& params,
                               const GpOptions& options = {});

/// Same quantity with its analytic gradient in log-parameters.
LmlResult log_marginal_likelihood_with_gradient(const Eigen::MatrixXd& train_x,
                                                const Eigen::VectorXd& train_y, double mean_const,
                                                const KernelParams& params,
                                                const GpOptions& options = {});

struct GpPrediction {
    double mu = 0.0;
    double sigma = 0.0;
};

struct PredictionBatch {
    Eigen::VectorXd mu;
    Eigen::VectorXd sigma;
};

/// Fitted noise-free GP. Responses are standardized internally; everything
/// exposed through params(), mean_const() and predictions is in original units.
class GpModel {
public:
    const Eigen::MatrixXd& train_x() const { return train_x_; }
    const Eigen::VectorXd& train_y() const { return train_y_; }
    std::size_t size() const { return static_cast<std::size_t>(train_x_.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(train_x_.cols()); }

    double mean_const() const { return mean_const_; }
    /// Hyperparameters on the original response scale.
    KernelParams params() const { return {standardized_.sigma_f2 * y_scale_ * y_scale_, standardized_.ell}; }
    /// Hyperparameters on the standardized response scale (what the optimizer sees).
    const KernelParams& standardized_params() const { return standardized_; }
    double y_scale() const { return y_scale_; }

    /// Lower Cholesky factor of the standardized kernel matrix plus jitter.
    const Eigen::MatrixXd& factor() const { return factor_; }
    /// factor * factor' ~ K + jitter I, standardized scale.
    double jitter() const { return jitter_; }
    /// K^-1 (y - m) on the standardized scale.
    const Eigen::VectorXd& alpha() const { return alpha_; }
    double log_likelihood() const { return lml_; }
    /// Set when the best restart hit the iteration limit or stalled.
    bool optimizer_warning() const { return warning_; }

private:
    friend GpModel fit(const Eigen::MatrixXd&, const Eigen::VectorXd&, const GpOptions&);
    friend GpModel make_model(const Eigen::MatrixXd&, const Eigen::VectorXd&, const KernelParams&,
                              const GpOptions&);

    Eigen::MatrixXd train_x_;
    Eigen::VectorXd train_y_;
    double mean_const_ = 0.0;
    double y_scale_ = 1.0;
    KernelParams standardized_;
    Eigen::MatrixXd factor_;
    double jitter_ = 0.0;
    Eigen::VectorXd alpha_;
    double lml_ = 0.0;
    bool warning_ = false;
};

/// Maximum-likelihood fit with bounded multi-start quasi-Newton search over
/// (log ell, log sigma_f2). Throws DegenerateDataError on constant responses.
GpModel fit(const Eigen::MatrixXd& train_x, const Eigen::VectorXd& train_y,
            const GpOptions& options = {});

/// Model at fixed hyperparameters given on the standardized scale.
GpModel make_model(const Eigen::MatrixXd& train_x, const Eigen::VectorXd& train_y,
                   const KernelParams& standardized, const GpOptions& options = {});

/// Predictive mean and standard deviation at each row of x_star.
PredictionBatch predict_batch(const GpModel& model, const Eigen::MatrixXd& x_star);

std::vector<GpPrediction> predict(const GpModel& model, const Eigen::MatrixXd& x_star);

/// Predictive mean only; cheaper when the variance is not needed.
Eigen::VectorXd predict_mean(const GpModel& model, const Eigen::MatrixXd& x_star);

}  // namespace relax
