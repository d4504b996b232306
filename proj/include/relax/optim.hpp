#pragma once

#include <functional>

#include <Eigen/Dense>

namespace relax {

struct BoxOptions {
    int max_iterations = 200;
    int memory = 8;
    /// Stop when the infinity norm of the projected gradient drops below this.
    double pgtol = 1e-6;
    /// Stop when the relative decrease of f is below factr * machine epsilon.
    double factr = 1e7;
};

struct BoxResult {
    Eigen::VectorXd x;
    double f = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

/// Value of f at x; writes the gradient into grad. May throw to signal an
/// infeasible point, which the line search treats as +inf.
using BoxObjective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

/// Minimizes f over the box [lower, upper] with a projected limited-memory BFGS
/// method: quasi-Newton steps on the free variables, variables pinned at a bound
/// while the gradient pushes outward, and an Armijo search along the projected path.
BoxResult minimize_box(const BoxObjective& f, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                       const Eigen::VectorXd& upper, const BoxOptions& options = {});

}  // namespace relax
