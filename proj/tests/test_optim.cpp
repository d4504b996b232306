#include <doctest.h>

#include <cmath>

#include "relax/optim.hpp"

using namespace relax;

TEST_CASE("box minimizer finds an interior minimum") {
    const BoxObjective quad = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g.resize(2);
        g << 2.0 * (x[0] - 1.0), 20.0 * (x[1] + 2.0);
        return (x[0] - 1.0) * (x[0] - 1.0) + 10.0 * (x[1] + 2.0) * (x[1] + 2.0);
    };
    const BoxResult r = minimize_box(quad, Eigen::Vector2d(4.0, 4.0), Eigen::Vector2d(-5, -5), Eigen::Vector2d(5, 5));
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(r.x[1] == doctest::Approx(-2.0).epsilon(1e-5));
    CHECK(r.converged);
}

TEST_CASE("box minimizer stops on an active bound") {
    const BoxObjective quad = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g.resize(2);
        g << 2.0 * (x[0] - 3.0), 2.0 * x[1];
        return (x[0] - 3.0) * (x[0] - 3.0) + x[1] * x[1];
    };
    const BoxResult r = minimize_box(quad, Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1));
    CHECK(r.x[0] == 1.0);
    CHECK(std::fabs(r.x[1]) < 1e-6);
}

TEST_CASE("box minimizer handles Rosenbrock") {
    const BoxObjective rosen = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
        g.resize(2);
        g << -2.0 * a - 400.0 * x[0] * b, 200.0 * b;
        return a * a + 100.0 * b * b;
    };
    BoxOptions opt;
    opt.max_iterations = 500;
    const BoxResult r =
        minimize_box(rosen, Eigen::Vector2d(-1.2, 1.0), Eigen::Vector2d(-2, -2), Eigen::Vector2d(2, 2), opt);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-3));
}
