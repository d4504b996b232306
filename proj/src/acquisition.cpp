#include "relax/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "relax/errors.hpp"
#include "relax/normal.hpp"

namespace relax {

std::string_view to_token(Strategy s) {
    switch (s) {
        case Strategy::U: return "u";
        case Strategy::Eff: return "eff";
        case Strategy::MooK: return "moo-k";
        case Strategy::MooC: return "moo-c";
        case Strategy::MooR: return "moo-r";
    }
    return "unknown";
}

std::optional<Strategy> strategy_from_token(std::string_view token) {
    for (Strategy s : kAllStrategies) {
        if (to_token(s) == token) {
            return s;
        }
    }
    return std::nullopt;
}

std::string strategy_token_list() {
    std::string out;
    for (Strategy s : kAllStrategies) {
        out += (out.empty() ? "" : ", ") + std::string(to_token(s));
    }
    return out;
}

void MooRState::push(double pf) {
    history_.push_back(pf);
    while (history_.size() > window_ + 1) {
        history_.pop_front();
    }
    ++iteration_;
}

double u_value(double mu, double sigma) {
    return std::fabs(mu) / sigma;
}

double eff_value(double mu, double sigma, const EffConfig& cfg) {
    if (!(sigma > 0.0)) {
        throw ArgumentError("eff_value: sigma must be positive");
    }
    // EFF = sigma * Psi(alpha). Psi is even; evaluating at -|alpha| keeps the
    // CDF terms in the lower tail where erfc has full relative accuracy.
    const double a = std::fabs(mu / sigma);
    const double c = cfg.c;
    const double lo = -c - a;  // (-eps - |mu|) / sigma
    const double hi = c - a;   // (eps - |mu|) / sigma
    const double psi = a * (2.0 * normal_cdf(-a) - normal_cdf(lo) - normal_cdf(hi)) -
                       (2.0 * normal_pdf(-a) - normal_pdf(lo) - normal_pdf(hi)) +
                       c * (normal_cdf(hi) - normal_cdf(lo));
    return sigma * psi;
}

namespace {

template <typename Better>
std::size_t arg_best(const std::vector<double>& scores, Better better) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (better(scores[i], scores[best])) {
            best = i;
        }
    }
    return best;
}

void require_normalized(const ParetoSet& front) {
    if (front.size() == 0) {
        throw ArgumentError("Pareto front is empty");
    }
    if (front.normalized.size() != front.size()) {
        throw ArgumentError("Pareto front has not been normalized");
    }
}

std::vector<double> f_mu_column(const ParetoSet& front) {
    std::vector<double> v;
    v.reserve(front.size());
    for (const ObjectivePair& p : front.normalized) v.push_back(p.f_mu);
    return v;
}

std::vector<double> f_sigma_column(const ParetoSet& front) {
    std::vector<double> v;
    v.reserve(front.size());
    for (const ObjectivePair& p : front.normalized) v.push_back(p.f_sigma);
    return v;
}

const auto kLess = [](double a, double b) { return a < b; };
const auto kGreater = [](double a, double b) { return a > b; };

std::vector<double> u_scores(std::span<const GpPrediction> preds) {
    std::vector<double> s(preds.size(), std::numeric_limits<double>::infinity());
    bool any = false;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i].sigma > 0.0) {
            s[i] = u_value(preds[i].mu, preds[i].sigma);
            any = true;
        }
    }
    if (!any) {
        throw DegeneratePoolError("select_u: every candidate has zero predictive standard deviation");
    }
    return s;
}

std::vector<double> eff_scores(std::span<const GpPrediction> preds, const EffConfig& cfg) {
    std::vector<double> s(preds.size(), 0.0);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i].sigma > 0.0) {
            s[i] = eff_value(preds[i].mu, preds[i].sigma, cfg);
        }
    }
    return s;
}

template <typename Better>
std::vector<std::size_t> stable_order(const std::vector<double>& scores, Better better) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return better(scores[a], scores[b]); });
    return order;
}

// Score order with a dominance-consistent tie-break on exact zero scores:
// U = 0 or EFF = 0 (underflow) can tie a point with one that dominates it, so
// among those the smaller |mu|, then the larger sigma, comes first.
template <typename Better>
bool ranks_before(const std::vector<double>& scores, std::span<const GpPrediction> preds, std::size_t a,
                  std::size_t b, Better better) {
    if (better(scores[a], scores[b])) return true;
    if (better(scores[b], scores[a]) || scores[a] != 0.0) return false;
    const double ma = std::fabs(preds[a].mu), mb = std::fabs(preds[b].mu);
    if (ma != mb) return ma < mb;
    return preds[a].sigma > preds[b].sigma;
}

template <typename Better>
std::size_t pool_best(const std::vector<double>& scores, std::span<const GpPrediction> preds, Better better) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (ranks_before(scores, preds, i, best, better)) best = i;
    }
    return best;
}

template <typename Better>
std::vector<std::size_t> pool_order(const std::vector<double>& scores, std::span<const GpPrediction> preds,
                                    Better better) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return ranks_before(scores, preds, a, b, better); });
    return order;
}

}  // namespace

std::vector<double> knee_distances(const ParetoSet& front) {
    require_normalized(front);
    const auto& f = front.normalized;
    double mu_max = -1.0, mu_min = 2.0, sigma_max = -1.0, sigma_min = 2.0;
    for (const ObjectivePair& p : f) {
        mu_max = std::max(mu_max, p.f_mu);
        mu_min = std::min(mu_min, p.f_mu);
        sigma_max = std::max(sigma_max, p.f_sigma);
        sigma_min = std::min(sigma_min, p.f_sigma);
    }
    // Extremes: exploitation (mu_max, sigma_min) and exploration (mu_min, sigma_max).
    const double ax = mu_max, ay = sigma_min;
    const double ux = mu_min - mu_max, uy = sigma_max - sigma_min;
    const double uu = ux * ux + uy * uy;
    std::vector<double> d(f.size(), 0.0);
    if (uu == 0.0) {
        return d;
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double vx = f[i].f_mu - ax, vy = f[i].f_sigma - ay;
        const double t = (vx * ux + vy * uy) / uu;
        d[i] = std::hypot(vx - t * ux, vy - t * uy);
    }
    return d;
}

std::vector<double> compromise_distances(const ParetoSet& front) {
    require_normalized(front);
    double mu_ideal = -std::numeric_limits<double>::infinity();
    double sigma_ideal = -std::numeric_limits<double>::infinity();
    for (const ObjectivePair& p : front.normalized) {
        mu_ideal = std::max(mu_ideal, p.f_mu);
        sigma_ideal = std::max(sigma_ideal, p.f_sigma);
    }
    std::vector<double> d;
    d.reserve(front.size());
    for (const ObjectivePair& p : front.normalized) {
        d.push_back(std::hypot(mu_ideal - p.f_mu, sigma_ideal - p.f_sigma));
    }
    return d;
}

std::vector<double> moor_scores(const ParetoSet& front, double g) {
    require_normalized(front);
    std::vector<double> s;
    s.reserve(front.size());
    for (const ObjectivePair& p : front.normalized) {
        s.push_back((1.0 - g) * p.f_mu + g * p.f_sigma);
    }
    return s;
}

std::optional<double> delta_pf_avg(const MooRState& state) {
    const auto& h = state.history();
    if (h.size() < 2) {
        return std::nullopt;
    }
    double sum = 0.0;
    for (std::size_t j = 0; j + 1 < h.size(); ++j) {
        if (h[j] == 0.0) {
            return std::nullopt;
        }
        sum += std::fabs(h[j + 1] - h[j]) / h[j];
    }
    return sum / static_cast<double>(h.size() - 1);
}

double gamma(double delta_pf, const MooRConfig& cfg) {
    return cfg.gamma_max * (1.0 / (1.0 + std::exp(-cfg.lambda * (delta_pf - cfg.delta_p0))));
}

std::optional<double> moor_gamma(const MooRState& state, const MooRConfig& cfg) {
    if (state.history().size() < cfg.window + 1) {
        return std::nullopt;
    }
    const std::optional<double> delta = delta_pf_avg(state);
    if (!delta) {
        return std::nullopt;
    }
    return gamma(*delta, cfg);
}

std::size_t select_u(std::span<const GpPrediction> preds) {
    if (preds.empty()) {
        throw ArgumentError("select_u: empty pool");
    }
    return pool_best(u_scores(preds), preds, kLess);
}

std::size_t select_eff(std::span<const GpPrediction> preds, const EffConfig& cfg) {
    if (preds.empty()) {
        throw ArgumentError("select_eff: empty pool");
    }
    return pool_best(eff_scores(preds, cfg), preds, kGreater);
}

std::size_t select_knee(const ParetoSet& front) {
    require_normalized(front);
    if (front.size() <= 2) {
        return front.indices[arg_best(f_mu_column(front), kGreater)];
    }
    return front.indices[arg_best(knee_distances(front), kGreater)];
}

std::size_t select_compromise(const ParetoSet& front) {
    return front.indices[arg_best(compromise_distances(front), kLess)];
}

std::size_t select_moor_at(const ParetoSet& front, double g) {
    return front.indices[arg_best(moor_scores(front, g), kGreater)];
}

std::size_t select_moor(const ParetoSet& front, const MooRState& state, const MooRConfig& cfg) {
    require_normalized(front);
    const std::optional<double> g = moor_gamma(state, cfg);
    if (!g) {
        return front.indices[arg_best(f_sigma_column(front), kGreater)];
    }
    return select_moor_at(front, *g);
}

std::vector<std::size_t> preference_order(Strategy strategy, std::span<const GpPrediction> preds,
                                          const ParetoSet& front, const MooRState& state,
                                          const EffConfig& eff, const MooRConfig& moor) {
    auto to_pool = [&](const std::vector<std::size_t>& positions) {
        std::vector<std::size_t> out;
        out.reserve(positions.size());
        for (std::size_t p : positions) out.push_back(front.indices[p]);
        return out;
    };
    switch (strategy) {
        case Strategy::U:
            return pool_order(u_scores(preds), preds, kLess);
        case Strategy::Eff:
            return pool_order(eff_scores(preds, eff), preds, kGreater);
        case Strategy::MooK:
            if (front.size() <= 2) {
                return to_pool(stable_order(f_mu_column(front), kGreater));
            }
            return to_pool(stable_order(knee_distances(front), kGreater));
        case Strategy::MooC:
            return to_pool(stable_order(compromise_distances(front), kLess));
        case Strategy::MooR: {
            const std::optional<double> g = moor_gamma(state, moor);
            return to_pool(g ? stable_order(moor_scores(front, *g), kGreater)
                             : stable_order(f_sigma_column(front), kGreater));
        }
    }
    throw ArgumentError("unknown strategy");
}

WeightInterval weight_interval(const ParetoSet& front, std::size_t selected_pool_index,
                               std::size_t grid_size) {
    require_normalized(front);
    if (grid_size < 2) {
        throw ArgumentError("weight_interval: grid_size must be at least 2");
    }
    const std::size_t sel = front.position_of(selected_pool_index);
    if (sel == front.size()) {
        throw ArgumentError("weight_interval: selected index is not a member of the front");
    }

    double mu_ideal = -std::numeric_limits<double>::infinity();
    double sigma_ideal = -std::numeric_limits<double>::infinity();
    for (const ObjectivePair& p : front.normalized) {
        mu_ideal = std::max(mu_ideal, p.f_mu);
        sigma_ideal = std::max(sigma_ideal, p.f_sigma);
    }
    const std::size_t k = front.size();
    std::vector<double> dmu2(k), dsigma2(k);
    for (std::size_t i = 0; i < k; ++i) {
        dmu2[i] = std::pow(mu_ideal - front.normalized[i].f_mu, 2);
        dsigma2[i] = std::pow(sigma_ideal - front.normalized[i].f_sigma, 2);
    }

    // The square root is monotone, so comparing squared scores is equivalent.
    const double step = 1.0 / static_cast<double>(grid_size - 1);
    std::optional<std::size_t> first, last;
    std::size_t best_rank = k, best_rank_at = 0;
    for (std::size_t g = 0; g < grid_size; ++g) {
        const double w = static_cast<double>(g) * step;
        const double own = w * dmu2[sel] + (1.0 - w) * dsigma2[sel];
        std::size_t rank = 0;
        for (std::size_t i = 0; i < k; ++i) {
            const double s = w * dmu2[i] + (1.0 - w) * dsigma2[i];
            if (s < own || (s == own && i < sel)) {
                ++rank;
            }
        }
        if (rank == 0) {
            if (!first) first = g;
            last = g;
        }
        if (rank < best_rank) {
            best_rank = rank;
            best_rank_at = g;
        }
    }

    WeightInterval out;
    if (first) {
        out.w_min = std::max(0.0, static_cast<double>(*first) * step - 0.5 * step);
        out.w_max = std::min(1.0, static_cast<double>(*last) * step + 0.5 * step);
    } else {
        out.w_min = out.w_max = static_cast<double>(best_rank_at) * step;
        out.never_selected = true;
    }
    out.w_bar = 0.5 * (out.w_min + out.w_max);
    return out;
}

}  // namespace relax
