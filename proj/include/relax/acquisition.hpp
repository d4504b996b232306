#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relax/gp.hpp"
#include "relax/pareto.hpp"

namespace relax {

enum class Strategy { U, Eff, MooK, MooC, MooR };

inline constexpr Strategy kAllStrategies[] = {Strategy::U, Strategy::Eff, Strategy::MooK, Strategy::MooC,
                                              Strategy::MooR};

std::string_view to_token(Strategy s);
std::optional<Strategy> strategy_from_token(std::string_view token);
std::string strategy_token_list();

/// True for strategies that pick from the Pareto front rather than the pool.
inline bool selects_from_front(Strategy s) {
    return s == Strategy::MooK || s == Strategy::MooC || s == Strategy::MooR;
}

struct EffConfig {
    /// Half-width of the feasibility band in units of sigma.
    double c = 2.0;
};

struct MooRConfig {
    double gamma_max = 1.0;
    double lambda = 40.0;
    double delta_p0 = 0.2;
    /// Sliding window N_it over relative P_F changes.
    std::size_t window = 3;
};

/// Most recent failure-probability estimates, newest last.
class MooRState {
public:
    explicit MooRState(std::size_t window = 3) : window_(window) {}

    void push(double pf);

    std::size_t window() const { return window_; }
    std::size_t iteration() const { return iteration_; }
    const std::deque<double>& history() const { return history_; }

private:
    std::size_t window_;
    std::size_t iteration_ = 0;
    std::deque<double> history_;
};

struct WeightInterval {
    double w_min = 0.0;
    double w_max = 1.0;
    double w_bar = 0.5;
    /// The member never wins on the grid; the interval is the degenerate
    /// point where its rank is best.
    bool never_selected = false;
};

// Scores ------------------------------------------------------------------

/// |mu| / sigma; requires sigma > 0.
double u_value(double mu, double sigma);

/// Expected feasibility with band +-c sigma around zero, closed form.
/// Throws ArgumentError for sigma <= 0.
double eff_value(double mu, double sigma, const EffConfig& cfg = {});

/// Perpendicular distance of each normalized member to the line through the
/// two extreme members.
std::vector<double> knee_distances(const ParetoSet& front);

/// Euclidean distance of each normalized member to the ideal point.
std::vector<double> compromise_distances(const ParetoSet& front);

/// (1 - gamma) f_mu + gamma f_sigma per normalized member.
std::vector<double> moor_scores(const ParetoSet& front, double gamma);

/// Mean relative change of P_F over the window; nullopt when fewer than two
/// estimates exist or a denominator in the window is zero.
std::optional<double> delta_pf_avg(const MooRState& state);

/// Logistic exploration weight.
double gamma(double delta_pf, const MooRConfig& cfg = {});

/// Weight used by MOO-R at this state, or nullopt during the initial
/// exploration phase (fewer than N_it elapsed iterations or unavailable change).
std::optional<double> moor_gamma(const MooRState& state, const MooRConfig& cfg = {});

// Selections (all ties break to the lowest pool index) ----------------------

std::size_t select_u(std::span<const GpPrediction> preds);
std::size_t select_eff(std::span<const GpPrediction> preds, const EffConfig& cfg = {});
std::size_t select_knee(const ParetoSet& front);
std::size_t select_compromise(const ParetoSet& front);
std::size_t select_moor(const ParetoSet& front, const MooRState& state, const MooRConfig& cfg = {});
/// MOO-R selection at a fixed weight.
std::size_t select_moor_at(const ParetoSet& front, double gamma);

/// Candidates in decreasing preference under a strategy, used when the first
/// choice must be rejected. Pool indices for U/EFF, front members for MOO.
std::vector<std::size_t> preference_order(Strategy strategy, std::span<const GpPrediction> preds,
                                          const ParetoSet& front, const MooRState& state,
                                          const EffConfig& eff, const MooRConfig& moor);

/// Range of Euclidean-compromise weights on a uniform grid in [0,1] under
/// which the member with the given pool index would be selected.
WeightInterval weight_interval(const ParetoSet& front, std::size_t selected_pool_index,
                               std::size_t grid_size = 1001);

}  // namespace relax
