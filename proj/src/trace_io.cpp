#include "relax/trace_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "relax/errors.hpp"

namespace relax {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string join_flags(const std::vector<std::string>& flags) {
    std::string out;
    for (const std::string& f : flags) {
        out += (out.empty() ? "" : "|") + f;
    }
    return out;
}

std::string optional_cell(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, sep)) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == sep) {
        cells.emplace_back();
    }
    return cells;
}

double parse_double(const std::string& s) {
    if (s.empty()) throw ArgumentError("trace: empty numeric cell");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) {
        throw ArgumentError("trace: malformed number '" + s + "'");
    }
    return v;
}

std::uint64_t parse_uint(const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
        throw ArgumentError("trace: malformed integer '" + s + "'");
    }
    return std::stoull(s);
}

std::optional<double> parse_optional(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return parse_double(s);
}

constexpr const char* kFixedColumns[] = {
    "run_seed", "iter",  "n_train", "pf_hat",      "beta_hat",       "delta_beta",
    "pareto_k", "pareto_frac", "gamma", "w_min", "w_max", "w_bar",
    "sel_obj_fmu", "sel_obj_fsigma", "ell", "sigma_f2", "flags",
};
constexpr std::size_t kFixedCount = std::size(kFixedColumns);

}  // namespace

std::vector<TraceRow> trace_rows(const RunResult& result) {
    std::vector<TraceRow> rows;
    rows.reserve(result.records.size());
    for (const IterationRecord& r : result.records) {
        TraceRow row;
        row.run_seed = result.seed;
        row.iter = r.t;
        row.n_train = r.n_train;
        row.pf_hat = r.pf_hat;
        row.beta_hat = r.beta_hat;
        row.delta_beta = r.delta_beta;
        row.pareto_k = r.pareto_size;
        row.pareto_frac = r.pareto_frac;
        row.gamma = r.gamma;
        if (r.weights) {
            row.w_min = r.weights->w_min;
            row.w_max = r.weights->w_max;
            row.w_bar = r.weights->w_bar;
        }
        row.sel_obj_fmu = r.selected_obj.f_mu;
        row.sel_obj_fsigma = r.selected_obj.f_sigma;
        row.ell = r.params.ell;
        row.sigma_f2 = r.params.sigma_f2;
        row.flags = join_flags(r.flags);
        row.sel_u.assign(r.selected_u.data(), r.selected_u.data() + r.selected_u.size());
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string trace_header(std::size_t dim) {
    std::string out;
    for (const char* c : kFixedColumns) {
        out += (out.empty() ? "" : ",") + std::string(c);
    }
    for (std::size_t i = 1; i <= dim; ++i) {
        out += ",sel_u_" + std::to_string(i);
    }
    return out;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows, std::size_t dim) {
    out << trace_header(dim) << '\n';
    for (const TraceRow& r : rows) {
        if (r.sel_u.size() != dim) {
            throw ArgumentError("write_trace_csv: row dimension does not match header");
        }
        out << r.run_seed << ',' << r.iter << ',' << r.n_train << ',' << format_double(r.pf_hat) << ','
            << format_double(r.beta_hat) << ',' << format_double(r.delta_beta) << ',' << r.pareto_k << ','
            << format_double(r.pareto_frac) << ',' << optional_cell(r.gamma) << ',' << optional_cell(r.w_min)
            << ',' << optional_cell(r.w_max) << ',' << optional_cell(r.w_bar) << ','
            << format_double(r.sel_obj_fmu) << ',' << format_double(r.sel_obj_fsigma) << ','
            << format_double(r.ell) << ',' << format_double(r.sigma_f2) << ',' << r.flags;
        for (double u : r.sel_u) {
            out << ',' << format_double(u);
        }
        out << '\n';
    }
}

std::vector<TraceRow> read_trace_csv(std::istream& in, std::size_t* dim_out) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ArgumentError("trace: missing header");
    }
    const std::vector<std::string> header = split(line, ',');
    if (header.size() < kFixedCount) {
        throw ArgumentError("trace: header has too few columns");
    }
    const std::size_t dim = header.size() - kFixedCount;
    if (line != trace_header(dim)) {
        throw ArgumentError("trace: unexpected header '" + line + "'");
    }
    if (dim_out) *dim_out = dim;

    std::vector<TraceRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> c = split(line, ',');
        if (c.size() != header.size()) {
            throw ArgumentError("trace: row has " + std::to_string(c.size()) + " cells, expected " +
                                std::to_string(header.size()));
        }
        TraceRow r;
        r.run_seed = parse_uint(c[0]);
        r.iter = parse_uint(c[1]);
        r.n_train = parse_uint(c[2]);
        r.pf_hat = parse_double(c[3]);
        r.beta_hat = parse_double(c[4]);
        r.delta_beta = parse_double(c[5]);
        r.pareto_k = parse_uint(c[6]);
        r.pareto_frac = parse_double(c[7]);
        r.gamma = parse_optional(c[8]);
        r.w_min = parse_optional(c[9]);
        r.w_max = parse_optional(c[10]);
        r.w_bar = parse_optional(c[11]);
        r.sel_obj_fmu = parse_double(c[12]);
        r.sel_obj_fsigma = parse_double(c[13]);
        r.ell = parse_double(c[14]);
        r.sigma_f2 = parse_double(c[15]);
        r.flags = c[16];
        for (std::size_t i = kFixedCount; i < c.size(); ++i) {
            r.sel_u.push_back(parse_double(c[i]));
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<TargetSpec> parse_targets(const std::string& text) {
    std::vector<TargetSpec> out;
    for (const std::string& item : split(text, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == item.size()) {
            throw ArgumentError("targets: expected 'delta:S' pairs, got '" + item + "'");
        }
        TargetSpec t;
        try {
            t.target = parse_double(item.substr(0, colon));
            t.consecutive = parse_uint(item.substr(colon + 1));
        } catch (const ArgumentError&) {
            throw ArgumentError("targets: malformed pair '" + item + "'");
        }
        if (!(t.target > 0.0) || t.consecutive == 0) {
            throw ArgumentError("targets: threshold must be positive and S at least 1 in '" + item + "'");
        }
        out.push_back(t);
    }
    if (out.empty()) {
        throw ArgumentError("targets: no pairs given");
    }
    return out;
}

std::string format_targets(const std::vector<TargetSpec>& targets) {
    std::string out;
    for (const TargetSpec& t : targets) {
        out += (out.empty() ? "" : ",") + format_double(t.target) + ":" + std::to_string(t.consecutive);
    }
    return out;
}

json config_to_json(const ExperimentConfig& c) {
    json targets = json::array();
    for (const TargetSpec& t : c.targets) {
        targets.push_back({{"target", t.target}, {"consecutive", t.consecutive}});
    }
    return {
        {"lsf", std::string(to_token(c.lsf))},
        {"strategy", std::string(to_token(c.strategy))},
        {"n_initial", c.n_initial},
        {"budget", c.budget},
        {"pool_size", c.pool_size},
        {"mcs_size", c.mcs_size},
        {"base_seed", c.base_seed},
        {"seed_count", c.seed_count},
        {"weight_grid", c.weight_grid},
        {"targets", targets},
        {"eff", {{"c", c.eff.c}}},
        {"moor",
         {{"gamma_max", c.moor.gamma_max},
          {"lambda", c.moor.lambda},
          {"delta_p0", c.moor.delta_p0},
          {"window", c.moor.window}}},
        {"gp",
         {{"log_ell_min", c.gp.log_ell_min},
          {"log_ell_max", c.gp.log_ell_max},
          {"log_sf2_min", c.gp.log_sf2_min},
          {"log_sf2_max", c.gp.log_sf2_max},
          {"restarts", c.gp.restarts},
          {"jitter_start", c.gp.jitter_start},
          {"jitter_max", c.gp.jitter_max},
          {"max_iterations", c.gp.max_iterations}}},
    };
}

namespace {

template <typename T>
void take(const json& obj, const char* key, T& field) {
    if (obj.contains(key)) {
        field = obj.at(key).get<T>();
    }
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) {
            throw ArgumentError("config: unknown key '" + where + key + "'");
        }
    }
}

}  // namespace

void apply_config_json(const json& j, ExperimentConfig& c) {
    if (!j.is_object()) {
        throw ArgumentError("config: top level must be a JSON object");
    }
    try {
        reject_unknown(j,
                       {"lsf", "strategy", "n_initial", "budget", "pool_size", "mcs_size", "base_seed",
                        "seed_count", "weight_grid", "targets", "eff", "moor", "gp"},
                       "");
        if (j.contains("lsf")) {
            const std::string token = j.at("lsf").get<std::string>();
            const auto id = lsf_from_token(token);
            if (!id) throw ArgumentError("config: unknown lsf '" + token + "' (valid: " + lsf_token_list() + ")");
            c.lsf = *id;
        }
        if (j.contains("strategy")) {
            const std::string token = j.at("strategy").get<std::string>();
            const auto s = strategy_from_token(token);
            if (!s) {
                throw ArgumentError("config: unknown strategy '" + token + "' (valid: " + strategy_token_list() +
                                    ")");
            }
            c.strategy = *s;
        }
        take(j, "n_initial", c.n_initial);
        take(j, "budget", c.budget);
        take(j, "pool_size", c.pool_size);
        take(j, "mcs_size", c.mcs_size);
        take(j, "base_seed", c.base_seed);
        take(j, "seed_count", c.seed_count);
        take(j, "weight_grid", c.weight_grid);
        if (j.contains("targets")) {
            const json& t = j.at("targets");
            if (t.is_string()) {
                c.targets = parse_targets(t.get<std::string>());
            } else {
                c.targets.clear();
                for (const json& item : t) {
                    reject_unknown(item, {"target", "consecutive"}, "targets.");
                    c.targets.push_back({item.at("target").get<double>(), item.at("consecutive").get<std::size_t>()});
                }
            }
        }
        if (j.contains("eff")) {
            const json& e = j.at("eff");
            reject_unknown(e, {"c"}, "eff.");
            take(e, "c", c.eff.c);
        }
        if (j.contains("moor")) {
            const json& m = j.at("moor");
            reject_unknown(m, {"gamma_max", "lambda", "delta_p0", "window"}, "moor.");
            take(m, "gamma_max", c.moor.gamma_max);
            take(m, "lambda", c.moor.lambda);
            take(m, "delta_p0", c.moor.delta_p0);
            take(m, "window", c.moor.window);
        }
        if (j.contains("gp")) {
            const json& g = j.at("gp");
            reject_unknown(g,
                           {"log_ell_min", "log_ell_max", "log_sf2_min", "log_sf2_max", "restarts", "jitter_start",
                            "jitter_max", "max_iterations"},
                           "gp.");
            take(g, "log_ell_min", c.gp.log_ell_min);
            take(g, "log_ell_max", c.gp.log_ell_max);
            take(g, "log_sf2_min", c.gp.log_sf2_min);
            take(g, "log_sf2_max", c.gp.log_sf2_max);
            take(g, "restarts", c.gp.restarts);
            take(g, "jitter_start", c.gp.jitter_start);
            take(g, "jitter_max", c.gp.jitter_max);
            take(g, "max_iterations", c.gp.max_iterations);
        }
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("config: ") + e.what());
    }
}

json run_document(const RunResult& r) {
    json hits = json::array();
    for (std::size_t k = 0; k < r.config.targets.size(); ++k) {
        hits.push_back({{"target", r.config.targets[k].target},
                        {"consecutive", r.config.targets[k].consecutive},
                        {"reached", r.hits.at(k).has_value()},
                        {"samples", r.hit_samples(k)}});
    }
    PhaseTimes total;
    for (const IterationRecord& rec : r.records) {
        total.fit += rec.times.fit;
        total.mcs += rec.times.mcs;
        total.pool += rec.times.pool;
        total.select += rec.times.select;
    }
    return {
        {"config", config_to_json(r.config)},
        {"seed", r.seed},
        {"reference_beta", r.reference_beta},
        {"iterations", r.records.size()},
        {"truncated", r.truncated},
        {"error", r.error},
        {"first_hits", hits},
        {"wall_seconds", {{"fit", total.fit}, {"mcs", total.mcs}, {"pool_predict", total.pool}, {"selection", total.select}}},
    };
}

SummaryDocument make_summary(const std::vector<RunResult>& results) {
    if (results.empty()) {
        throw ArgumentError("make_summary: no runs");
    }
    SummaryDocument doc;
    doc.config = config_to_json(results.front().config);
    doc.reference_beta = results.front().reference_beta;
    for (std::size_t k = 0; k < results.front().config.targets.size(); ++k) {
        const TargetSummary s = aggregate(results, k);
        doc.targets.push_back({s.target, s.median, s.p2_5, s.p97_5, s.n_not_reached});
    }
    for (const RunResult& r : results) {
        SummaryRun run;
        run.seed = r.seed;
        run.truncated = r.truncated;
        for (std::size_t k = 0; k < r.config.targets.size(); ++k) {
            run.first_hit_samples.push_back(r.hit_samples(k));
        }
        doc.runs.push_back(std::move(run));
    }
    return doc;
}

json to_json(const SummaryDocument& doc) {
    json targets = json::array();
    for (const SummaryTarget& t : doc.targets) {
        targets.push_back({{"target", t.target.target},
                           {"consecutive", t.target.consecutive},
                           {"median", t.median},
                           {"p2_5", t.p2_5},
                           {"p97_5", t.p97_5},
                           {"n_not_reached", t.n_not_reached}});
    }
    json runs = json::array();
    for (const SummaryRun& r : doc.runs) {
        runs.push_back({{"seed", r.seed}, {"first_hit_samples", r.first_hit_samples}, {"truncated", r.truncated}});
    }
    return {{"config", doc.config}, {"reference_beta", doc.reference_beta}, {"targets", targets}, {"runs", runs}};
}

SummaryDocument summary_from_json(const json& j) {
    try {
        SummaryDocument doc;
        doc.config = j.at("config");
        doc.reference_beta = j.at("reference_beta").get<double>();
        for (const json& t : j.at("targets")) {
            doc.targets.push_back({{t.at("target").get<double>(), t.at("consecutive").get<std::size_t>()},
                                   t.at("median").get<double>(),
                                   t.at("p2_5").get<double>(),
                                   t.at("p97_5").get<double>(),
                                   t.at("n_not_reached").get<std::size_t>()});
        }
        for (const json& r : j.at("runs")) {
            doc.runs.push_back({r.at("seed").get<std::uint64_t>(),
                                r.at("first_hit_samples").get<std::vector<std::size_t>>(),
                                r.at("truncated").get<bool>()});
        }
        return doc;
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("summary: ") + e.what());
    }
}

}  // namespace relax
