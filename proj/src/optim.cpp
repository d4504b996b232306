#include "relax/optim.hpp"

#include <cmath>
#include <algorithm>
#include <deque>
#include <limits>
#include <vector>

#include "relax/errors.hpp"

namespace relax {

namespace {

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    return x.cwiseMax(lo).cwiseMin(hi);
}

struct Pair {
    Eigen::VectorXd s;
    Eigen::VectorXd y;
};

// Two-loop recursion applied to q with the inactive components masked out.
Eigen::VectorXd two_loop(const std::deque<Pair>& memory, Eigen::VectorXd q, const Eigen::ArrayXd& free_mask) {
    const std::size_t k = memory.size();
    std::vector<double> alpha(k), rho(k);
    for (std::size_t i = k; i-- > 0;) {
        const Eigen::VectorXd s = memory[i].s.array() * free_mask;
        const Eigen::VectorXd y = memory[i].y.array() * free_mask;
        const double sy = s.dot(y);
        rho[i] = sy > 0.0 ? 1.0 / sy : 0.0;
        alpha[i] = rho[i] * s.dot(q);
        q -= alpha[i] * y;
    }
    if (k > 0) {
        const Eigen::VectorXd s = memory.back().s.array() * free_mask;
        const Eigen::VectorXd y = memory.back().y.array() * free_mask;
        const double yy = y.squaredNorm();
        if (yy > 0.0 && s.dot(y) > 0.0) {
            q *= s.dot(y) / yy;
        }
    }
    for (std::size_t i = 0; i < k; ++i) {
        const Eigen::VectorXd s = memory[i].s.array() * free_mask;
        const Eigen::VectorXd y = memory[i].y.array() * free_mask;
        const double beta = rho[i] * y.dot(q);
        q += (alpha[i] - beta) * s;
    }
    return q;
}

}  // namespace

BoxResult minimize_box(const BoxObjective& f, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                       const Eigen::VectorXd& upper, const BoxOptions& options) {
    if (x0.size() != lower.size() || x0.size() != upper.size()) {
        throw ArgumentError("minimize_box: dimension mismatch between x0 and bounds");
    }
    if ((lower.array() > upper.array()).any()) {
        throw ArgumentError("minimize_box: lower bound exceeds upper bound");
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const Eigen::Index n = x0.size();

    BoxResult result;
    Eigen::VectorXd x = project(x0, lower, upper);
    Eigen::VectorXd g(n);
    double fx = f(x, g);
    result.evaluations = 1;

    std::deque<Pair> memory;
    for (result.iterations = 0; result.iterations < options.max_iterations; ++result.iterations) {
        const Eigen::VectorXd pg = x - project(x - g, lower, upper);
        if (pg.lpNorm<Eigen::Infinity>() < options.pgtol) {
            result.converged = true;
            break;
        }

        Eigen::ArrayXd free_mask = Eigen::ArrayXd::Ones(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            if ((x[i] <= lower[i] && g[i] > 0.0) || (x[i] >= upper[i] && g[i] < 0.0)) {
                free_mask[i] = 0.0;
            }
        }
        const Eigen::VectorXd masked_g = g.array() * free_mask;
        Eigen::VectorXd d = -two_loop(memory, masked_g, free_mask);
        d = d.array() * free_mask;
        if (g.dot(d) >= 0.0) {
            memory.clear();
            d = -masked_g;
        }

        double step = 1.0;
        if (memory.empty()) {
            const double dmax = d.lpNorm<Eigen::Infinity>();
            if (dmax > 1.0) {
                step = 1.0 / dmax;
            }
        }

        bool accepted = false;
        Eigen::VectorXd x_new, g_new(n);
        double f_new = 0.0;
        for (int trial = 0; trial < 40; ++trial, step *= 0.5) {
            x_new = project(x + step * d, lower, upper);
            if ((x_new - x).lpNorm<Eigen::Infinity>() == 0.0) {
                break;
            }
            ++result.evaluations;
            try {
                f_new = f(x_new, g_new);
            } catch (const std::exception&) {
                continue;
            }
            if (std::isfinite(f_new) && f_new <= fx + 1e-4 * g.dot(x_new - x)) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // No progress along the projected path; stationary to working precision.
            result.converged = pg.lpNorm<Eigen::Infinity>() < std::sqrt(options.pgtol);
            break;
        }

        Pair pair{x_new - x, g_new - g};
        if (pair.s.dot(pair.y) > 1e-10 * pair.s.norm() * pair.y.norm()) {
            memory.push_back(std::move(pair));
            if (static_cast<int>(memory.size()) > options.memory) {
                memory.pop_front();
            }
        }
        const double reduction = (fx - f_new) / std::max({std::fabs(fx), std::fabs(f_new), 1.0});
        x = std::move(x_new);
        g = g_new;
        fx = f_new;
        if (reduction <= options.factr * eps) {
            result.converged = true;
            ++result.iterations;
            break;
        }
    }
    result.x = std::move(x);
    result.f = fx;
    return result;
}

}  // namespace relax
