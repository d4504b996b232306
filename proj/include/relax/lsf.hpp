#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace relax {

enum class LsfId {
    FourBranchK6,
    FourBranchK7,
    Himmelblau,
    Hat,
    NonlinearOscillator,
    HighDim40,
};

inline constexpr std::array<LsfId, 6> kAllLsfIds = {
    LsfId::FourBranchK6, LsfId::FourBranchK7, LsfId::Himmelblau,
    LsfId::Hat,          LsfId::NonlinearOscillator, LsfId::HighDim40,
};

struct MarginalSpec {
    enum class Family { Normal, Lognormal };

    Family family = Family::Normal;
    double mean = 0.0;
    double std = 1.0;

    /// Physical value for a standard-normal coordinate.
    double from_standard_normal(double u) const;
};

struct LsfDefinition {
    LsfId id;
    std::size_t dim;
    std::vector<MarginalSpec> marginals;
    std::optional<double> k_or_xi;
};

struct ReferenceReliability {
    double p_f;
    double beta;
};

/// Benchmark definition (dimension, marginals, shape parameter).
const LsfDefinition& definition(LsfId id);

/// Limit-state value g(x) in physical space; failure iff g <= 0.
double evaluate(LsfId id, std::span<const double> x_physical);

/// Isoprobabilistic map from standard-normal space to physical space.
Eigen::VectorXd to_physical(LsfId id, std::span<const double> u);

/// g evaluated at a standard-normal point.
double evaluate_standard(LsfId id, std::span<const double> u);

/// Published reference failure probability and reliability index.
ReferenceReliability reference(LsfId id);

std::string_view to_token(LsfId id);
std::optional<LsfId> lsf_from_token(std::string_view token);
/// "four-branch-6, four-branch-7, ..." for diagnostics.
std::string lsf_token_list();

}  // namespace relax
