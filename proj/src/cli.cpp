#include "relax/cli.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "relax/errors.hpp"
#include "relax/experiment.hpp"
#include "relax/reliability.hpp"
#include "relax/trace_io.hpp"

namespace relax {

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
    std::string lsf;
    std::string strategy;
    std::string seed;
    std::string budget;
    std::string n_initial;
    std::string pool_size;
    std::string mcs_size;
    std::string out_dir = "results";
    std::string config_file;
    std::string targets;
    std::string seeds;
    bool full_scale = false;
    bool quiet = false;
};

struct ReferenceFlags {
    std::string lsf;
    std::string n = "1e6";
    std::string reps = "10";
    std::string seed = "1";
};

// Accepts plain integers and exact scientific forms such as "1e5".
std::size_t parse_count(const std::string& flag, const std::string& text) {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE || !(v >= 0.0) ||
        v != std::floor(v) || v > 9.0e15) {
        throw ArgumentError(flag + ": expected a non-negative integer, got '" + text + "'");
    }
    return static_cast<std::size_t>(v);
}

LsfId parse_lsf(const std::string& token) {
    const auto id = lsf_from_token(token);
    if (!id) {
        throw ArgumentError("unknown limit-state function '" + token + "' (valid: " + lsf_token_list() + ")");
    }
    return *id;
}

Strategy parse_strategy(const std::string& token) {
    const auto s = strategy_from_token(token);
    if (!s) {
        throw ArgumentError("unknown strategy '" + token + "' (valid: " + strategy_token_list() + ")");
    }
    return *s;
}

// defaults < --full-scale < --config file < explicit flags
ExperimentConfig build_config(const CommonFlags& f) {
    ExperimentConfig c;
    if (f.full_scale) {
        c.pool_size = 1000000;
        c.mcs_size = 10000000;
    }
    if (!f.config_file.empty()) {
        std::ifstream in(f.config_file);
        if (!in) throw ArgumentError("cannot read config file '" + f.config_file + "'");
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ArgumentError("malformed config file '" + f.config_file + "': " + e.what());
        }
        apply_config_json(j, c);
    }
    if (!f.lsf.empty()) c.lsf = parse_lsf(f.lsf);
    if (!f.strategy.empty()) c.strategy = parse_strategy(f.strategy);
    if (!f.seed.empty()) c.base_seed = parse_count("--seed", f.seed);
    if (!f.budget.empty()) c.budget = parse_count("--budget", f.budget);
    if (!f.n_initial.empty()) c.n_initial = parse_count("--n-initial", f.n_initial);
    if (!f.pool_size.empty()) c.pool_size = parse_count("--pool-size", f.pool_size);
    if (!f.mcs_size.empty()) c.mcs_size = parse_count("--mcs-size", f.mcs_size);
    if (!f.seeds.empty()) c.seed_count = parse_count("--seeds", f.seeds);
    if (!f.targets.empty()) c.targets = parse_targets(f.targets);
    c.validate();
    return c;
}

fs::path prepare_out_dir(const std::string& dir) {
    const fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec || !fs::is_directory(p)) {
        throw ArgumentError("cannot create output directory '" + dir + "'");
    }
    return p;
}

std::ofstream open_for_write(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ArgumentError("cannot write '" + path.string() + "'");
    return out;
}

std::string stem(const ExperimentConfig& c) {
    return std::string(to_token(c.lsf)) + "_" + std::string(to_token(c.strategy));
}

void write_run_files(const fs::path& dir, const RunResult& r) {
    const std::string name = stem(r.config) + "_" + std::to_string(r.seed);
    {
        std::ofstream out = open_for_write(dir / ("trace_" + name + ".csv"));
        write_trace_csv(out, trace_rows(r), definition(r.config.lsf).dim);
        if (!out) throw ArgumentError("failed writing trace for seed " + std::to_string(r.seed));
    }
    std::ofstream out = open_for_write(dir / ("run_" + name + ".json"));
    out << run_document(r).dump(2) << '\n';
    if (!out) throw ArgumentError("failed writing run document for seed " + std::to_string(r.seed));
}

RunObserver make_logger(std::ostream& err, bool quiet) {
    if (quiet) return {};
    return [&err](std::uint64_t seed, const IterationRecord& rec) {
        err << "seed " << seed << " iter " << rec.t << " n=" << rec.n_train << " pf=" << std::setprecision(6)
            << rec.pf_hat << " beta=" << rec.beta_hat << " dbeta=" << rec.delta_beta << " K=" << rec.pareto_size
            << " ell=" << rec.params.ell << '\n';
    };
}

void report_run(std::ostream& err, const RunResult& r) {
    if (r.truncated) {
        err << "seed " << r.seed << " truncated: " << r.error << '\n';
    }
}

int cmd_run(const CommonFlags& f, std::ostream& out, std::ostream& err) {
    const ExperimentConfig c = build_config(f);
    const fs::path dir = prepare_out_dir(f.out_dir);
    const RunResult r = run(c, c.base_seed, make_logger(err, f.quiet));
    write_run_files(dir, r);
    report_run(err, r);
    for (std::size_t k = 0; k < c.targets.size(); ++k) {
        out << "target " << format_double(c.targets[k].target) << ":" << c.targets[k].consecutive
            << " first-hit samples " << r.hit_samples(k) << (r.hits[k] ? "" : " (not reached)") << '\n';
    }
    return 0;
}

int cmd_sweep(const CommonFlags& f, std::ostream& out, std::ostream& err) {
    const ExperimentConfig c = build_config(f);
    const fs::path dir = prepare_out_dir(f.out_dir);
    const std::vector<RunResult> results = sweep(c, make_logger(err, f.quiet));
    for (const RunResult& r : results) {
        write_run_files(dir, r);
        report_run(err, r);
    }
    const SummaryDocument doc = make_summary(results);
    {
        std::ofstream s = open_for_write(dir / ("summary_" + stem(c) + ".json"));
        s << to_json(doc).dump(2) << '\n';
        if (!s) throw ArgumentError("failed writing summary");
    }
    for (const SummaryTarget& t : doc.targets) {
        out << "target " << format_double(t.target.target) << ":" << t.target.consecutive << " median "
            << t.median << " [" << t.p2_5 << ", " << t.p97_5 << "] not reached " << t.n_not_reached << "/"
            << results.size() << '\n';
    }
    return 0;
}

int cmd_reference(const ReferenceFlags& f, std::ostream& out) {
    const LsfId id = parse_lsf(f.lsf);
    const std::size_t n = parse_count("--n", f.n);
    const std::size_t reps = parse_count("--reps", f.reps);
    if (n == 0 || reps == 0) throw ArgumentError("--n and --reps must be positive");
    const ReferenceCheck r = reference_check(id, n, reps, RngSeed{parse_count("--seed", f.seed)});
    out << std::setprecision(6);
    out << "lsf " << to_token(id) << " n " << n << " reps " << reps << '\n';
    out << "mean_pf " << r.mean_pf << '\n';
    out << "beta " << r.beta << '\n';
    out << "std_error " << r.std_error << '\n';
    out << "stored_pf " << r.stored.p_f << '\n';
    out << "stored_beta " << r.stored.beta << '\n';
    out << "rel_deviation " << r.rel_deviation << '\n';
    out << "z " << r.z << '\n';
    return 0;
}

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--lsf", f.lsf, "Limit-state function: " + lsf_token_list() + " (default four-branch-6)");
    cmd->add_option("--strategy", f.strategy, "Selection strategy: " + strategy_token_list() + " (default moo-r)");
    cmd->add_option("--seed", f.seed, "Run seed; sweeps use seed, seed+1, ... (default 1)");
    cmd->add_option("--budget", f.budget, "Active samples after the initial design (default 190)");
    cmd->add_option("--n-initial", f.n_initial, "Initial LHS design size (default 10)");
    cmd->add_option("--pool-size", f.pool_size, "Candidate pool size per iteration (default 1e5)");
    cmd->add_option("--mcs-size", f.mcs_size, "Monte Carlo sample size per iteration (default 1e6)");
    cmd->add_option("--out", f.out_dir, "Output directory (default results)");
    cmd->add_option("--config", f.config_file, "JSON file overriding defaults; explicit flags win");
    cmd->add_flag("--full-scale", f.full_scale, "Pool 1e6 and MCS 1e7");
    cmd->add_flag("--quiet", f.quiet, "Suppress the per-iteration log");
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Active-learning reliability analysis with Pareto-front sample selection", "relax"};
    app.require_subcommand(1);

    CommonFlags run_flags;
    CLI::App* run_cmd = app.add_subcommand("run", "Single active-learning run");
    add_common(run_cmd, run_flags);
    run_cmd->add_option("--targets", run_flags.targets, "delta_beta:S pairs (default 1e-2:3,5e-3:3,1e-3:3)");

    CommonFlags sweep_flags;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Runs over consecutive seeds plus a summary");
    add_common(sweep_cmd, sweep_flags);
    sweep_cmd->add_option("--seeds", sweep_flags.seeds, "Number of seeds (default 15)");
    sweep_cmd->add_option("--targets", sweep_flags.targets, "delta_beta:S pairs (default 1e-2:3,5e-3:3,1e-3:3)");

    ReferenceFlags ref_flags;
    CLI::App* ref_cmd = app.add_subcommand("reference", "Crude Monte Carlo check of the stored reference");
    ref_cmd->add_option("--lsf", ref_flags.lsf, "Limit-state function: " + lsf_token_list())->required();
    ref_cmd->add_option("--n", ref_flags.n, "Draws per replication (default 1e6)");
    ref_cmd->add_option("--reps", ref_flags.reps, "Replications (default 10)");
    ref_cmd->add_option("--seed", ref_flags.seed, "Seed (default 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*run_cmd) return cmd_run(run_flags, out, err);
        if (*sweep_cmd) return cmd_sweep(sweep_flags, out, err);
        return cmd_reference(ref_flags, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace relax
