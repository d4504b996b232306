#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "relax/errors.hpp"
#include "relax/gp.hpp"
#include "relax/lsf.hpp"
#include "relax/sampling.hpp"

using namespace relax;

namespace {

Eigen::MatrixXd gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const KernelParams& p) {
    Eigen::MatrixXd k(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < b.rows(); ++j) {
            k(i, j) = kernel(a.row(i).transpose(), b.row(j).transpose(), p);
        }
    }
    return k;
}

struct DensePrediction {
    Eigen::VectorXd mu;
    Eigen::VectorXd var;
};

// Posterior mean and variance through an explicit inverse in extended precision,
// in the model's standardized units.
DensePrediction dense_predict(const GpModel& model, const Eigen::MatrixXd& xq) {
    using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    const KernelParams p = model.standardized_params();
    const long double s = model.y_scale();
    MatrixL k = gram(model.train_x(), model.train_x(), p).cast<long double>();
    k.diagonal().array() += static_cast<long double>(model.jitter());
    const MatrixL kinv = Eigen::FullPivLU<MatrixL>(k).inverse();
    const MatrixL r = ((model.train_y().array() - model.mean_const()) / model.y_scale()).matrix().cast<long double>();
    const MatrixL ks = gram(model.train_x(), xq, p).cast<long double>();
    const MatrixL mu = ks.transpose() * kinv * r;
    const MatrixL quad = ks.transpose() * kinv * ks;
    DensePrediction out{Eigen::VectorXd(xq.rows()), Eigen::VectorXd(xq.rows())};
    for (Eigen::Index i = 0; i < xq.rows(); ++i) {
        out.mu[i] = static_cast<double>(model.mean_const() + s * mu(i, 0));
        out.var[i] = static_cast<double>(s * s * (p.sigma_f2 - quad(i, i)));
    }
    return out;
}

double dense_lml(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double mean, const KernelParams& p, double jitter) {
    Eigen::MatrixXd k = gram(x, x, p);
    k.diagonal().array() += jitter;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(k);
    const Eigen::VectorXd r = (y.array() - mean).matrix();
    const double n = static_cast<double>(y.size());
    return -0.5 * r.dot(lu.inverse() * r) - 0.5 * std::log(lu.determinant()) - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

Eigen::MatrixXd random_inputs(std::size_t n, std::size_t m, std::uint64_t seed) {
    return mcs_pool(n, m, RngSeed{seed});
}

Eigen::VectorXd four_branch_values(const Eigen::MatrixXd& x) {
    Eigen::VectorXd y(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double u[2] = {x(i, 0), x(i, 1)};
        y[i] = evaluate_standard(LsfId::FourBranchK6, u);
    }
    return y;
}

}  // namespace

TEST_CASE("matern kernel values") {
    CHECK(kernel_at_distance(0.0, {2.5, 0.7}) == 2.5);
    const double expected = (1.0 + std::sqrt(3.0)) * std::exp(-std::sqrt(3.0));
    CHECK(kernel_at_distance(1.0, {1.0, 1.0}) == doctest::Approx(expected).epsilon(1e-15));
    CHECK(expected == doctest::Approx(0.4833577).epsilon(1e-6));

    Rng rng(RngSeed{4});
    for (int i = 0; i < 50; ++i) {
        Eigen::Vector3d a(rng.normal(), rng.normal(), rng.normal());
        Eigen::Vector3d b(rng.normal(), rng.normal(), rng.normal());
        CHECK(kernel(a, b, {1.3, 0.6}) == kernel(b, a, {1.3, 0.6}));
    }
}

TEST_CASE("log marginal likelihood with identity kernel and zero residual") {
    Eigen::MatrixXd x(2, 1);
    x << 0.0, 50.0;
    const Eigen::VectorXd y = Eigen::VectorXd::Zero(2);
    const double v = log_marginal_likelihood(x, y, 0.0, {1.0, 0.01});
    CHECK(v == doctest::Approx(-std::log(2.0 * std::numbers::pi)).epsilon(1e-9));
}

TEST_CASE("log marginal likelihood matches a dense oracle") {
    const Eigen::MatrixXd x = random_inputs(5, 2, 17);
    const Eigen::VectorXd y = four_branch_values(x);
    const KernelParams p{2.0, 1.5};
    const LmlResult r = log_marginal_likelihood_with_gradient(x, y, y.mean(), p);
    CHECK(r.value == doctest::Approx(dense_lml(x, y, y.mean(), p, r.jitter)).epsilon(1e-8));
    CHECK(log_marginal_likelihood(x, y, y.mean(), p) == r.value);
}

TEST_CASE("log marginal likelihood drops when responses are scaled up") {
    const Eigen::MatrixXd x = random_inputs(8, 2, 3);
    const Eigen::VectorXd y = four_branch_values(x);
    const KernelParams p{1.0, 1.0};
    CHECK(log_marginal_likelihood(x, 10.0 * y, 0.0, p) < log_marginal_likelihood(x, y, 0.0, p));
}

TEST_CASE("log marginal likelihood gradient matches finite differences") {
    const Eigen::MatrixXd x = random_inputs(12, 2, 21);
    const Eigen::VectorXd y = four_branch_values(x);
    const double m = y.mean();
    for (const KernelParams p : {KernelParams{1.0, 1.0}, KernelParams{3.0, 0.4}, KernelParams{0.2, 2.5}}) {
        const LmlResult r = log_marginal_likelihood_with_gradient(x, y, m, p);
        const double h = 1e-5;
        const double d_ell = (log_marginal_likelihood(x, y, m, {p.sigma_f2, p.ell * std::exp(h)}) -
                              log_marginal_likelihood(x, y, m, {p.sigma_f2, p.ell * std::exp(-h)})) /
                             (2.0 * h);
        const double d_sf2 = (log_marginal_likelihood(x, y, m, {p.sigma_f2 * std::exp(h), p.ell}) -
                              log_marginal_likelihood(x, y, m, {p.sigma_f2 * std::exp(-h), p.ell})) /
                             (2.0 * h);
        CHECK(r.grad_log[0] == doctest::Approx(d_ell).epsilon(1e-5));
        CHECK(r.grad_log[1] == doctest::Approx(d_sf2).epsilon(1e-5));
    }
}

TEST_CASE("fit interpolates four-branch on an initial design") {
    const Eigen::MatrixXd x = unit_to_standard_normal(lhs_unit_hypercube(10, 2, RngSeed{1}));
    const Eigen::VectorXd y = four_branch_values(x);
    const GpModel model = fit(x, y);
    CHECK(model.mean_const() == doctest::Approx(y.mean()).epsilon(1e-15));
    const PredictionBatch p = predict_batch(model, x);
    const double sf = std::sqrt(model.params().sigma_f2);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        CHECK(std::fabs(p.mu[i] - y[i]) <= 1e-6 * (1.0 + std::fabs(y[i])));
        CHECK(p.sigma[i] <= 1e-4 * sf);
    }
}

TEST_CASE("fit is deterministic") {
    const Eigen::MatrixXd x = random_inputs(15, 2, 8);
    const Eigen::VectorXd y = four_branch_values(x);
    const GpModel a = fit(x, y), b = fit(x, y);
    CHECK(a.params().ell == b.params().ell);
    CHECK(a.params().sigma_f2 == b.params().sigma_f2);
    CHECK(a.log_likelihood() == b.log_likelihood());
}

TEST_CASE("fit recovers the length scale of a Matern draw") {
    const std::size_t n = 50;
    const Eigen::MatrixXd x = random_inputs(n, 2, 31);
    Eigen::MatrixXd k = gram(x, x, {1.0, 0.8});
    k.diagonal().array() += 1e-10;
    const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(k).matrixL();
    Rng rng(RngSeed{32});
    Eigen::VectorXd z(n);
    for (std::size_t i = 0; i < n; ++i) z[static_cast<Eigen::Index>(i)] = rng.normal();
    const Eigen::VectorXd y = l * z;
    const GpModel model = fit(x, y);
    CHECK(model.params().ell > 0.4);
    CHECK(model.params().ell < 1.6);
}

TEST_CASE("fit rejects constant responses") {
    const Eigen::MatrixXd x = random_inputs(6, 2, 2);
    CHECK_THROWS_AS(fit(x, Eigen::VectorXd::Constant(6, -1.0)), DegenerateDataError);
}

TEST_CASE("predict matches the dense oracle on small models") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const std::size_t n = 3 + seed % 18;
        const Eigen::MatrixXd x = random_inputs(n, 2, 100 + seed);
        const Eigen::VectorXd y = four_branch_values(x);
        const GpModel model = fit(x, y);
        const Eigen::MatrixXd xq = random_inputs(40, 2, 500 + seed);
        const PredictionBatch p = predict_batch(model, xq);
        const DensePrediction d = dense_predict(model, xq);
        const double sf2 = model.params().sigma_f2;
        for (Eigen::Index i = 0; i < xq.rows(); ++i) {
            CHECK(std::fabs(p.mu[i] - d.mu[i]) <= 1e-8 * std::max(1.0, std::fabs(d.mu[i])));
            CHECK(std::fabs(p.sigma[i] * p.sigma[i] - std::max(d.var[i], 0.0)) <= 1e-8 * sf2);
        }
    }
}

TEST_CASE("predict reverts to the prior far from the data") {
    const Eigen::MatrixXd x = random_inputs(10, 2, 5);
    const Eigen::VectorXd y = four_branch_values(x);
    const GpModel model = fit(x, y);
    Eigen::MatrixXd far(1, 2);
    far << 1e4, -1e4;
    const GpPrediction p = predict(model, far).front();
    CHECK(p.mu == doctest::Approx(model.mean_const()).epsilon(1e-12));
    CHECK(p.sigma == doctest::Approx(std::sqrt(model.params().sigma_f2)).epsilon(1e-12));
}

TEST_CASE("predictive variance never exceeds the signal variance") {
    const Eigen::MatrixXd x = random_inputs(30, 2, 6);
    const GpModel model = fit(x, four_branch_values(x));
    const PredictionBatch p = predict_batch(model, random_inputs(5000, 2, 7));
    CHECK((p.sigma.array().square() <= model.params().sigma_f2 + 1e-8).all());
    CHECK(p.mu == predict_mean(model, random_inputs(5000, 2, 7)));
}

TEST_CASE("predict rejects dimension mismatch") {
    const Eigen::MatrixXd x = random_inputs(6, 2, 2);
    const GpModel model = fit(x, four_branch_values(x));
    CHECK_THROWS_AS(predict_batch(model, Eigen::MatrixXd::Zero(3, 3)), ArgumentError);
}
