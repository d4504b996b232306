// Acceptance suite: prints one PASS/FAIL line per criterion.
// Usage: relax_acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "relax/acquisition.hpp"
#include "relax/experiment.hpp"
#include "relax/gp.hpp"
#include "relax/lsf.hpp"
#include "relax/reliability.hpp"
#include "relax/trace_io.hpp"
#include "support.hpp"

using namespace relax;
using relax::testing::brute_force_front;
using relax::testing::cross_product_distance;
using relax::testing::eff_quadrature;
using relax::testing::random_front;
using relax::testing::random_predictions;

namespace {

constexpr std::size_t kSeeds = 5;
constexpr std::size_t kBudget = 120;
constexpr double kTarget = 1e-2;

struct Verdict {
    bool pass;
    std::string detail;
};

ExperimentConfig desk_config(LsfId lsf, Strategy s) {
    ExperimentConfig c;
    c.lsf = lsf;
    c.strategy = s;
    c.n_initial = 10;
    c.budget = kBudget;
    c.pool_size = 100000;
    c.mcs_size = 1000000;
    c.base_seed = 1;
    c.seed_count = kSeeds;
    c.targets = {{kTarget, 3}};
    return c;
}

using RunKey = std::pair<LsfId, Strategy>;
std::map<RunKey, std::vector<RunResult>> g_runs;

const std::vector<RunResult>& desk_runs(LsfId lsf, Strategy s) {
    auto it = g_runs.find({lsf, s});
    if (it != g_runs.end()) return it->second;
    const ExperimentConfig c = desk_config(lsf, s);
    std::vector<RunResult> results;
    for (std::size_t k = 0; k < kSeeds; ++k) {
        const auto start = std::chrono::steady_clock::now();
        results.push_back(run(c, sweep_seed(c, k)));
        const RunResult& r = results.back();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::fprintf(stderr, "  [%s %s seed %llu] %zu iterations, first hit %zu samples, %.0f s%s%s\n",
                     std::string(to_token(lsf)).c_str(), std::string(to_token(s)).c_str(),
                     static_cast<unsigned long long>(r.seed), r.records.size(), r.hit_samples(0), secs,
                     r.truncated ? ", truncated: " : "", r.error.c_str());
    }
    return g_runs.emplace(RunKey{lsf, s}, std::move(results)).first->second;
}

std::size_t hits_within_budget(const std::vector<RunResult>& runs) {
    std::size_t n = 0;
    for (const RunResult& r : runs) {
        if (r.hits.at(0) && r.hit_samples(0) <= kBudget) ++n;
    }
    return n;
}

double median_hit(const std::vector<RunResult>& runs) {
    std::vector<double> v;
    for (const RunResult& r : runs) v.push_back(static_cast<double>(r.hit_samples(0)));
    return percentile(v, 50.0);
}

std::string fmt(const char* format, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, format, a);
    return buf;
}

Verdict reference_reproduction() {
    bool ok = true;
    std::ostringstream d;
    for (LsfId id : kAllLsfIds) {
        const ReferenceCheck r = reference_check(id, 1000000, 10, RngSeed{1});
        const bool pass = std::fabs(r.rel_deviation) <= 0.05 && std::fabs(r.z) <= 3.0;
        ok = ok && pass;
        d << to_token(id) << " " << fmt("%.4g", r.mean_pf) << " (" << fmt("%+.2f%%", 100.0 * r.rel_deviation)
          << ", z=" << fmt("%+.2f", r.z) << ")" << (pass ? "" : " !") << "; ";
    }
    return {ok, d.str()};
}

Verdict four_branch_convergence() {
    bool ok = true;
    std::ostringstream d;
    for (Strategy s : kAllStrategies) {
        const std::size_t hits = hits_within_budget(desk_runs(LsfId::FourBranchK6, s));
        const bool pass = s == Strategy::U ? hits <= 2 : hits >= 4;
        ok = ok && pass;
        d << to_token(s) << " " << hits << "/" << kSeeds << (pass ? "" : " !") << "; ";
    }
    return {ok, d.str()};
}

Verdict himmelblau_convergence() {
    const double moo_c = median_hit(desk_runs(LsfId::Himmelblau, Strategy::MooC));
    const double u = median_hit(desk_runs(LsfId::Himmelblau, Strategy::U));
    const bool pass = moo_c <= 60.0 && u >= 1.5 * moo_c;
    return {pass, "median first-hit samples moo-c " + fmt("%g", moo_c) + ", u " + fmt("%g", u) + " (ratio " +
                      fmt("%.2f", u / moo_c) + ")"};
}

Verdict proposition_property() {
    std::size_t violations = 0, pools = 0;
    for (std::uint64_t seed = 1; seed <= 250; ++seed) {
        const std::vector<GpPrediction> preds = random_predictions(1 + (seed * 7927) % 2000, 10000 + seed);
        const std::vector<std::size_t> front = brute_force_front(objectives(preds));
        auto member = [&](std::size_t i) { return std::binary_search(front.begin(), front.end(), i); };
        if (!member(select_u(preds))) ++violations;
        if (!member(select_eff(preds))) ++violations;
        ++pools;
    }
    return {violations == 0, std::to_string(pools) + " pools, " + std::to_string(violations) + " violations"};
}

Eigen::MatrixXd gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const KernelParams& p) {
    Eigen::MatrixXd k(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.rows(); ++j) k(i, j) = kernel(a.row(i).transpose(), b.row(j).transpose(), p);
    return k;
}

Verdict oracle_equivalences() {
    std::ostringstream d;

    std::size_t pareto_mismatch = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const std::vector<ObjectivePair> pairs = objectives(random_predictions(1 + (seed * 104729) % 2000, 20000 + seed));
        if (extract_pareto(pairs).indices != brute_force_front(pairs)) ++pareto_mismatch;
    }
    d << "(a) " << pareto_mismatch << "/100 mismatches; ";

    double gp_worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const std::size_t n = 2 + seed % 19;
        const Eigen::MatrixXd x = mcs_pool(n, 2, RngSeed{30000 + seed});
        Eigen::VectorXd y(x.rows());
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const double u[2] = {x(i, 0), x(i, 1)};
            y[i] = evaluate_standard(seed % 2 ? LsfId::FourBranchK6 : LsfId::Hat, u);
        }
        const GpModel model = fit(x, y);
        const Eigen::MatrixXd xq = mcs_pool(50, 2, RngSeed{40000 + seed});
        const PredictionBatch p = predict_batch(model, xq);
        const KernelParams sp = model.standardized_params();
        // Oracle evaluated in extended precision through an explicit inverse.
        using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
        MatrixL k = gram(x, x, sp).cast<long double>();
        k.diagonal().array() += static_cast<long double>(model.jitter());
        const MatrixL kinv = Eigen::FullPivLU<MatrixL>(k).inverse();
        const MatrixL r = ((y.array() - model.mean_const()) / model.y_scale()).matrix().cast<long double>();
        const MatrixL ks = gram(x, xq, sp).cast<long double>();
        const long double s = model.y_scale();
        const MatrixL kinv_r = kinv * r;
        for (Eigen::Index i = 0; i < xq.rows(); ++i) {
            const long double mu = model.mean_const() + s * (ks.col(i).transpose() * kinv_r)(0, 0);
            const long double quad = (ks.col(i).transpose() * kinv * ks.col(i))(0, 0);
            const double var = static_cast<double>(std::max(0.0L, s * s * (sp.sigma_f2 - quad)));
            const double mu_d = static_cast<double>(mu);
            gp_worst = std::max(gp_worst, std::fabs(p.mu[i] - mu_d) / std::max(1.0, std::fabs(mu_d)));
            gp_worst = std::max(gp_worst, std::fabs(p.sigma[i] * p.sigma[i] - var) / model.params().sigma_f2);
        }
    }
    d << "(b) max rel err " << fmt("%.2e", gp_worst) << "; ";

    double eff_worst = 0.0;
    for (double c : {0.5, 1.0, 2.0, 4.0}) {
        for (double alpha = -5.0; alpha <= 5.0 + 1e-12; alpha += 0.1) {
            const double ref = eff_quadrature(alpha, 1.0, c);
            eff_worst = std::max(eff_worst, std::fabs(eff_value(alpha, 1.0, {c}) - ref) / std::fabs(ref));
        }
    }
    d << "(c) max rel err " << fmt("%.2e", eff_worst) << "; ";

    std::size_t geometry_mismatch = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const ParetoSet f = normalize(extract_pareto(random_front(3 + seed % 60, 50000 + seed)));
        ObjectivePair a{}, b{};
        for (const ObjectivePair& q : f.normalized) {
            if (q.f_mu == 1.0) a = q;
            if (q.f_sigma == 1.0) b = q;
        }
        std::size_t knee = 0, comp = 0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (cross_product_distance(f.normalized[i], a, b) > cross_product_distance(f.normalized[knee], a, b) + 1e-12)
                knee = i;
            const auto dist = [&](std::size_t j) {
                return std::hypot(1.0 - f.normalized[j].f_mu, 1.0 - f.normalized[j].f_sigma);
            };
            if (dist(i) < dist(comp) - 1e-12) comp = i;
        }
        if (select_knee(f) != f.indices[knee]) ++geometry_mismatch;
        if (select_compromise(f) != f.indices[comp]) ++geometry_mismatch;
    }
    d << "(d) " << geometry_mismatch << " mismatches";

    const bool pass = pareto_mismatch == 0 && gp_worst <= 1e-8 && eff_worst <= 1e-8 && geometry_mismatch == 0;
    return {pass, d.str()};
}

Verdict interpolation_invariant() {
    double mu_worst = 0.0, sigma_worst = 0.0;
    std::size_t models = 0;
    for (Strategy s : kAllStrategies) {
        for (const RunResult& r : desk_runs(LsfId::FourBranchK6, s)) {
            for (const IterationRecord& rec : r.records) {
                mu_worst = std::max(mu_worst, rec.interp_mu_error);
                sigma_worst = std::max(sigma_worst, rec.interp_sigma_ratio);
                ++models;
            }
        }
    }
    const bool pass = models > 0 && mu_worst <= 1e-6 && sigma_worst <= 1e-4;
    return {pass, std::to_string(models) + " models, max |mu-y|/(1+|y|) " + fmt("%.2e", mu_worst) +
                      ", max sigma/sigma_f " + fmt("%.2e", sigma_worst)};
}

Verdict moor_controller() {
    const MooRConfig cfg;
    const bool mid = relax::gamma(cfg.delta_p0, cfg) == cfg.gamma_max / 2.0;
    const double g0 = relax::gamma(0.0, cfg);
    const bool zero = std::fabs(g0 - 1.0 / (1.0 + std::exp(8.0))) <= 1e-12;
    std::size_t extreme_mismatch = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const ParetoSet f = normalize(extract_pareto(random_front(1 + seed % 30, 60000 + seed)));
        std::size_t best_mu = 0, best_sigma = 0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (f.normalized[i].f_mu > f.normalized[best_mu].f_mu) best_mu = i;
            if (f.normalized[i].f_sigma > f.normalized[best_sigma].f_sigma) best_sigma = i;
        }
        if (select_moor_at(f, 0.0) != f.indices[best_mu]) ++extreme_mismatch;
        if (select_moor_at(f, 1.0) != f.indices[best_sigma]) ++extreme_mismatch;
    }
    return {mid && zero && extreme_mismatch == 0,
            std::string("gamma(dP0) midpoint ") + (mid ? "exact" : "off") + ", gamma(0) " + fmt("%.6e", g0) +
                ", extremes mismatches " + std::to_string(extreme_mismatch)};
}

Verdict pareto_cardinality() {
    std::vector<double> fractions;
    double worst = 0.0;
    for (Strategy s : kAllStrategies) {
        for (const RunResult& r : desk_runs(LsfId::FourBranchK6, s)) {
            for (const IterationRecord& rec : r.records) {
                fractions.push_back(rec.pareto_frac);
                worst = std::max(worst, rec.pareto_frac);
            }
        }
    }
    if (fractions.empty()) return {false, "no iterations"};
    const double median = percentile(fractions, 50.0);
    return {median < 0.01 && worst <= 0.05,
            "median K/N_pool " + fmt("%.3g%%", 100.0 * median) + ", max " + fmt("%.3g%%", 100.0 * worst)};
}

std::string trace_text(const RunResult& r) {
    std::ostringstream out;
    write_trace_csv(out, trace_rows(r), definition(r.config.lsf).dim);
    return out.str();
}

Verdict determinism() {
    const RunResult& original = desk_runs(LsfId::FourBranchK6, Strategy::MooR).front();
    const RunResult replay = run(original.config, original.seed);
    const std::string a = trace_text(original), b = trace_text(replay);
    return {a == b, "moo-r seed " + std::to_string(original.seed) + ", " + std::to_string(a.size()) + " bytes " +
                        (a == b ? "identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"reference reliability reproduction", reference_reproduction},
        {"desk-scale convergence, four-branch k=6", four_branch_convergence},
        {"desk-scale convergence, Himmelblau", himmelblau_convergence},
        {"non-dominance of U and EFF selections", proposition_property},
        {"oracle equivalences", oracle_equivalences},
        {"GP interpolation invariant", interpolation_invariant},
        {"MOO-R controller", moor_controller},
        {"Pareto-front cardinality", pareto_cardinality},
        {"trace determinism", determinism},
    };

    std::set<std::size_t> selected;
    for (int i = 1; i < argc; ++i) {
        const int k = std::atoi(argv[i]);
        if (k < 1 || k > static_cast<int>(criteria.size())) {
            std::cerr << "unknown criterion '" << argv[i] << "' (valid: 1-" << criteria.size() << ")\n";
            return 2;
        }
        selected.insert(static_cast<std::size_t>(k));
    }

    int failures = 0;
    for (std::size_t k = 1; k <= criteria.size(); ++k) {
        if (!selected.empty() && !selected.count(k)) continue;
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[k - 1].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << k << ": " << criteria[k - 1].first << " -- "
                  << v.detail << " [" << fmt("%.0f", secs) << " s]" << std::endl;
        if (!v.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
