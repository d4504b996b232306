#include "relax/lsf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "relax/errors.hpp"

namespace relax {

namespace {

using Family = MarginalSpec::Family;

constexpr double kHighDimStd = 0.2;

LsfDefinition make_definition(LsfId id) {
    const MarginalSpec std_normal{Family::Normal, 0.0, 1.0};
    switch (id) {
        case LsfId::FourBranchK6:
            return {id, 2, {std_normal, std_normal}, 6.0};
        case LsfId::FourBranchK7:
            return {id, 2, {std_normal, std_normal}, 7.0};
        case LsfId::Himmelblau:
            return {id, 2, {std_normal, std_normal}, 95.0};
        case LsfId::Hat: {
            const MarginalSpec shifted{Family::Normal, 0.25, 1.0};
            return {id, 2, {shifted, shifted}, std::nullopt};
        }
        case LsfId::NonlinearOscillator:
            // c1, c2, m, r, tau1, A1
            return {id,
                    6,
                    {{Family::Normal, 1.0, 0.1},
                     {Family::Normal, 0.1, 0.01},
                     {Family::Normal, 1.0, 0.05},
                     {Family::Normal, 0.5, 0.05},
                     {Family::Normal, 1.0, 0.2},
                     {Family::Normal, 1.0, 0.2}},
                    std::nullopt};
        case LsfId::HighDim40:
            return {id, 40,
                    std::vector<MarginalSpec>(40, MarginalSpec{Family::Lognormal, 1.0, kHighDimStd}),
                    std::nullopt};
    }
    throw ArgumentError("unknown limit-state id");
}

const std::array<LsfDefinition, 6>& definitions() {
    static const std::array<LsfDefinition, 6> table = {
        make_definition(LsfId::FourBranchK6),       make_definition(LsfId::FourBranchK7),
        make_definition(LsfId::Himmelblau),         make_definition(LsfId::Hat),
        make_definition(LsfId::NonlinearOscillator), make_definition(LsfId::HighDim40),
    };
    return table;
}

void check_input(const LsfDefinition& def, std::span<const double> x) {
    if (x.size() != def.dim) {
        throw ArgumentError("limit-state '" + std::string(to_token(def.id)) + "' expects " +
                            std::to_string(def.dim) + " inputs, got " + std::to_string(x.size()));
    }
    if (!std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); })) {
        throw ArgumentError("limit-state input contains a non-finite value");
    }
}

double four_branch(double x1, double x2, double k) {
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    const double d = x1 - x2;
    const double s = (x1 + x2) * inv_sqrt2;
    const double g1 = 3.0 + 0.1 * d * d - s;
    const double g2 = 3.0 + 0.1 * d * d + s;
    const double g3 = d + k * inv_sqrt2;
    const double g4 = -d + k * inv_sqrt2;
    return std::min({g1, g2, g3, g4});
}

double himmelblau(double x1, double x2, double xi) {
    const double a = 0.75 * x1 - 0.5;
    const double b = 0.75 * x2 - 0.5;
    const double t1 = a * a / 1.81 + b / 1.81 - 11.0;
    const double t2 = (0.75 * x1 - 1.0) / 1.81 + b * b / 1.81 - 7.0;
    return t1 * t1 + t2 * t2 - xi;
}

double hat(double x1, double x2) {
    const double d = x1 - x2;
    const double s = x1 + x2 - 4.0;
    return 20.0 - d * d - 8.0 * s * s * s;
}

double oscillator(std::span<const double> x) {
    const double c1 = x[0], c2 = x[1], m = x[2], r = x[3], tau1 = x[4], a1 = x[5];
    const double omega0 = std::sqrt((c1 + c2) / m);
    const double z_max = 2.0 * a1 / (m * omega0 * omega0) * std::sin(omega0 * tau1 / 2.0);
    return 3.0 * r - std::fabs(z_max);
}

double high_dim(std::span<const double> x) {
    const double m = static_cast<double>(x.size());
    double sum = 0.0;
    for (double v : x) {
        sum += v;
    }
    return (m + 3.0 * kHighDimStd * std::sqrt(m)) - sum;
}

}  // namespace

double MarginalSpec::from_standard_normal(double u) const {
    if (family == Family::Normal) {
        return mean + std * u;
    }
    const double sigma_ln2 = std::log1p((std * std) / (mean * mean));
    const double mu_ln = std::log(mean) - 0.5 * sigma_ln2;
    return std::exp(mu_ln + std::sqrt(sigma_ln2) * u);
}

const LsfDefinition& definition(LsfId id) {
    return definitions()[static_cast<std::size_t>(id)];
}

double evaluate(LsfId id, std::span<const double> x) {
    const LsfDefinition& def = definition(id);
    check_input(def, x);
    switch (id) {
        case LsfId::FourBranchK6:
        case LsfId::FourBranchK7:
            return four_branch(x[0], x[1], *def.k_or_xi);
        case LsfId::Himmelblau:
            return himmelblau(x[0], x[1], *def.k_or_xi);
        case LsfId::Hat:
            return hat(x[0], x[1]);
        case LsfId::NonlinearOscillator:
            return oscillator(x);
        case LsfId::HighDim40:
            return high_dim(x);
    }
    throw ArgumentError("unknown limit-state id");
}

Eigen::VectorXd to_physical(LsfId id, std::span<const double> u) {
    const LsfDefinition& def = definition(id);
    if (u.size() != def.dim) {
        throw ArgumentError("to_physical: expected " + std::to_string(def.dim) + " coordinates, got " +
                            std::to_string(u.size()));
    }
    Eigen::VectorXd x(def.dim);
    for (std::size_t i = 0; i < def.dim; ++i) {
        x[i] = def.marginals[i].from_standard_normal(u[i]);
    }
    return x;
}

double evaluate_standard(LsfId id, std::span<const double> u) {
    const Eigen::VectorXd x = to_physical(id, u);
    return evaluate(id, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

ReferenceReliability reference(LsfId id) {
    switch (id) {
        case LsfId::FourBranchK6: return {4.46e-3, 2.62};
        case LsfId::FourBranchK7: return {2.22e-3, 2.84};
        case LsfId::Himmelblau: return {1.66e-4, 3.59};
        case LsfId::Hat: return {3.87e-4, 3.36};
        case LsfId::NonlinearOscillator: return {2.86e-2, 1.90};
        case LsfId::HighDim40: return {1.98e-3, 2.88};
    }
    throw ArgumentError("unknown limit-state id");
}

std::string_view to_token(LsfId id) {
    switch (id) {
        case LsfId::FourBranchK6: return "four-branch-6";
        case LsfId::FourBranchK7: return "four-branch-7";
        case LsfId::Himmelblau: return "himmelblau";
        case LsfId::Hat: return "hat";
        case LsfId::NonlinearOscillator: return "oscillator";
        case LsfId::HighDim40: return "highdim40";
    }
    return "unknown";
}

std::optional<LsfId> lsf_from_token(std::string_view token) {
    for (LsfId id : kAllLsfIds) {
        if (to_token(id) == token) {
            return id;
        }
    }
    return std::nullopt;
}

std::string lsf_token_list() {
    std::string out;
    for (LsfId id : kAllLsfIds) {
        if (!out.empty()) {
            out += ", ";
        }
        out += to_token(id);
    }
    return out;
}

}  // namespace relax
