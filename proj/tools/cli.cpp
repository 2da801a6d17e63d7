#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcie/cases.hpp"
#include "mcie/deterministic.hpp"
#include "mcie/inference.hpp"
#include "mcie/mc_fredholm.hpp"
#include "mcie/mc_volterra.hpp"
#include "mcie/parallel.hpp"
#include "mcie/studies.hpp"

namespace mcie::cli {

using Json = nlohmann::ordered_json;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
    throw ConfigError("config field '" + field + "': " + what);
}

std::int64_t positive_integer(const Json& v, const std::string& field) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
        field_error(field, "must be a positive integer");
    }
    return v.get<std::int64_t>();
}

std::vector<std::int64_t> parse_budget_list(const std::string& text, const std::string& field) {
    std::vector<std::int64_t> out;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        const std::size_t end = std::min(text.find(',', begin), text.size());
        std::int64_t v = 0;
        const char* first = text.data() + begin;
        const char* last = text.data() + end;
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last || v < 1) {
            field_error(field, "expected a comma-separated list of positive integers");
        }
        out.push_back(v);
        begin = end + 1;
    }
    return out;
}

void check_config(const RunConfig& c) {
    if (c.N.empty()) {
        field_error("N", "must not be empty");
    }
    if (c.m < 1) {
        field_error("m", "must be a positive integer");
    }
    if (!(c.level > 0.0 && c.level < 1.0)) {
        field_error("level", "must lie in (0, 1)");
    }
    if (c.replications < 1) {
        field_error("reps", "must be a positive integer");
    }
}

}  // namespace

RunConfig parse_config_text(std::string_view json_text) {
    Json doc;
    try {
        doc = Json::parse(json_text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    RunConfig c;
    if (!doc.contains("case")) {
        field_error("case", "is required");
    }
    for (const auto& [key, v] : doc.items()) {
        if (key == "case") {
            if (!v.is_string() || v.get<std::string>().empty()) {
                field_error(key, "must be a non-empty string");
            }
            c.case_id = v.get<std::string>();
        } else if (key == "N") {
            c.N.clear();
            if (v.is_array()) {
                for (const auto& item : v) {
                    c.N.push_back(positive_integer(item, key));
                }
            } else {
                c.N.push_back(positive_integer(v, key));
            }
        } else if (key == "m") {
            c.m = static_cast<int>(positive_integer(v, key));
        } else if (key == "schedule") {
            if (!v.is_string()) {
                field_error(key, "must be a string");
            }
            try {
                c.schedule = parse_schedule_kind(v.get<std::string>());
            } catch (const ValidationError& e) {
                field_error(key, e.what());
            }
        } else if (key == "seed") {
            if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
                field_error(key, "must be a non-negative integer");
            }
            c.seed = v.get<std::uint64_t>();
        } else if (key == "level") {
            if (!v.is_number()) {
                field_error(key, "must be a number");
            }
            c.level = v.get<double>();
        } else if (key == "reps") {
            c.replications = static_cast<int>(positive_integer(v, key));
        } else if (key == "grid") {
            c.grid_points = static_cast<std::size_t>(positive_integer(v, key));
        } else if (key == "tau_grid") {
            c.tau_points = static_cast<std::size_t>(positive_integer(v, key));
        } else if (key == "out") {
            if (!v.is_string()) {
                field_error(key, "must be a string");
            }
            c.out = v.get<std::string>();
        } else {
            field_error(key, "unknown field");
        }
    }
    check_config(c);
    return c;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

namespace {

/// Flag values as given on the command line; unset flags keep config values.
struct Flags {
    std::optional<std::string> config;
    std::optional<std::string> case_id;
    std::optional<std::string> N;
    std::optional<int> m;
    std::optional<std::string> schedule;
    std::optional<std::uint64_t> seed;
    std::optional<double> level;
    std::optional<int> reps;
    std::optional<std::size_t> grid;
    std::optional<std::size_t> tau_grid;
    std::optional<std::string> out;
    std::size_t threads = 1;
    bool report = false;
    std::optional<std::string> constants;
};

RunConfig effective_config(const Flags& f) {
    RunConfig c;
    if (f.config) {
        c = parse_config(*f.config);
    }
    if (f.case_id) {
        c.case_id = *f.case_id;
    }
    if (f.N) {
        c.N = parse_budget_list(*f.N, "N");
    }
    if (f.m) {
        c.m = *f.m;
    }
    if (f.schedule) {
        c.schedule = parse_schedule_kind(*f.schedule);
    }
    if (f.seed) {
        c.seed = *f.seed;
    }
    if (f.level) {
        c.level = *f.level;
    }
    if (f.reps) {
        c.replications = *f.reps;
    }
    if (f.grid) {
        c.grid_points = *f.grid;
    }
    if (f.tau_grid) {
        c.tau_points = *f.tau_grid;
    }
    if (f.out) {
        c.out = *f.out;
    }
    check_config(c);
    return c;
}

std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}


void write_file(const std::string& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary);
    if (!file || !(file << content) || !file.flush()) {
        throw EvaluationError("cannot write output file '" + path + "'");
    }
}

std::int64_t single_budget(const RunConfig& c) {
    if (c.N.size() != 1) {
        field_error("N", "this command takes a single budget");
    }
    return c.N.front();
}

ManufacturedCase load_case(const RunConfig& c) {
    if (c.case_id.empty()) {
        field_error("case", "is required");
    }
    return manufactured_case(c.case_id, CaseOptions{c.grid_points, c.tau_points});
}

Json run_metadata(const std::string& command, const RunConfig& c, const ManufacturedCase& mc) {
    Json j;
    j["command"] = command;
    j["case"] = mc.id;
    j["kind"] = mc.is_fredholm() ? "fredholm" : "volterra";
    j["seed"] = c.seed;
    j["m"] = c.m;
    j["schedule"] = to_string(c.schedule);
    return j;
}

/// Per-point table and summary shared by `solve` and `band`.
struct BandOutput {
    std::string csv;
    Json summary;
};

BandOutput fredholm_band(const RunConfig& c, const ManufacturedCase& mc, bool diagnostics) {
    const FredholmProblem& problem = mc.fredholm().problem;
    const std::int64_t N = single_budget(c);
    const PartitionSchedule schedule = make_schedule(c.schedule, N, c.m);
    const RandomStream stream(c.seed);
    const FredholmRun run = mc_solve_fredholm(problem, schedule, stream, 0);
    const auto iterates = picard_solve(problem, c.m);
    const FunctionOnGrid& det = iterates.back();
    const CovarianceEstimate cov = estimate_covariance(problem, run);
    const auto& center = run.final_stage().grid_values;
    const ConfidenceBand band = confidence_band(center.values, cov, schedule.q(c.m), c.level, stream);

    std::ostringstream csv;
    csv << "point_index";
    for (std::size_t d = 0; d < problem.grid.dim(); ++d) {
        csv << ",coord" << d;
    }
    csv << ",mc_value,det_value,halfwidth\n";
    double ref_error = 0.0;
    for (std::size_t j = 0; j < problem.grid.size(); ++j) {
        csv << j;
        for (double x : problem.grid.point(j)) {
            csv << ',' << number(x);
        }
        csv << ',' << number(center.values[j]) << ',' << number(det.values[j]) << ',' << number(band.halfwidth)
            << '\n';
        ref_error = std::max(ref_error, std::abs(center.values[j] - mc.fredholm().reference(problem.grid.point(j))));
    }

    Json s = run_metadata(diagnostics ? "band" : "solve", c, mc);
    s["N"] = N;
    s["q"] = schedule.sizes;
    s["level"] = c.level;
    s["quantile"] = band.quantile;
    s["halfwidth"] = band.halfwidth;
    s["sup_error_vs_deterministic"] = sup_distance(center, det);
    s["sup_error_vs_reference"] = ref_error;
    s["apriori_bound"] = apriori_error_bound(problem.rho, sup_distance(iterates[1], iterates[0]), c.m);
    if (diagnostics) {
        const CovarianceEstimate limit = limit_covariance(problem, iterates[iterates.size() - 2]);
        double gap = 0.0;
        for (std::size_t i = 0; i < cov.matrix.size(); ++i) {
            gap = std::max(gap, std::abs(cov.matrix[i] - limit.matrix[i]));
        }
        s["max_variance"] = cov.max_diagonal();
        s["tail_log_asymptote"] =
            cov.max_diagonal() > 0.0 && band.quantile > 0.0 ? Json(tail_log_asymptote(band.quantile, cov)) : Json(nullptr);
        s["covariance_min_eigenvalue"] = cov.min_eigenvalue;
        s["covariance_repaired"] = cov.repaired;
        s["limit_covariance_max_gap"] = gap;
        const EntropyDiagnostic e = entropy_diagnostic(problem, iterates[iterates.size() - 2], 2.0);
        Json ej;
        ej["p"] = e.p;
        ej["integral_estimate"] = e.integral_estimate ? Json(*e.integral_estimate) : Json(nullptr);
        ej["growth_exponent"] = e.growth_exponent;
        ej["divergence_suspected"] = e.divergence_suspected;
        ej["insufficient_resolution"] = e.insufficient_resolution;
        ej["caveat"] = e.caveat;
        s["entropy"] = ej;
    }
    return {csv.str(), s};
}

BandOutput volterra_band(const RunConfig& c, const ManufacturedCase& mc, bool diagnostics) {
    const VolterraProblem& problem = mc.volterra().problem;
    const std::int64_t N = single_budget(c);
    const PartitionSchedule schedule = make_schedule(c.schedule, N, c.m);
    const RandomStream stream(c.seed);
    const VolterraRun run = mc_solve_volterra(problem, schedule, stream, 0);
    const auto iterates = volterra_solve(problem, c.m);
    const FunctionOnProductGrid& det = iterates.back();
    const CovarianceEstimate cov = estimate_covariance(problem, run);
    const auto& center = run.final_stage().grid_table;
    const ConfidenceBand band = confidence_band(center.values, cov, schedule.q(c.m), c.level, stream);

    std::ostringstream csv;
    csv << "point_index,tau";
    for (std::size_t d = 0; d < problem.grid.dim(); ++d) {
        csv << ",coord" << d;
    }
    csv << ",mc_value,det_value,halfwidth\n";
    double ref_error = 0.0;
    for (std::size_t a = 0; a < center.tau_count; ++a) {
        for (std::size_t j = 0; j < center.points; ++j) {
            const double tau = problem.tau_grid[a];
            csv << a * center.points + j << ',' << number(tau);
            for (double x : problem.grid.point(j)) {
                csv << ',' << number(x);
            }
            csv << ',' << number(center.at(a, j)) << ',' << number(det.at(a, j)) << ',' << number(band.halfwidth)
                << '\n';
            ref_error = std::max(ref_error, std::abs(center.at(a, j) - mc.volterra().reference(tau, problem.grid.point(j))));
        }
    }

    Json s = run_metadata(diagnostics ? "band" : "solve", c, mc);
    s["N"] = N;
    s["q"] = schedule.sizes;
    s["level"] = c.level;
    s["quantile"] = band.quantile;
    s["halfwidth"] = band.halfwidth;
    s["sup_error_vs_deterministic"] = sup_distance(center, det);
    s["sup_error_vs_reference"] = ref_error;
    s["tail_bound"] = volterra_tail_bound(problem.lip, sup_distance(iterates[1], iterates[0]), c.m);
    if (diagnostics) {
        const CovarianceEstimate limit = limit_covariance(problem, iterates[iterates.size() - 2]);
        double gap = 0.0;
        for (std::size_t i = 0; i < cov.matrix.size(); ++i) {
            gap = std::max(gap, std::abs(cov.matrix[i] - limit.matrix[i]));
        }
        s["max_variance"] = cov.max_diagonal();
        s["tail_log_asymptote"] =
            cov.max_diagonal() > 0.0 && band.quantile > 0.0 ? Json(tail_log_asymptote(band.quantile, cov)) : Json(nullptr);
        s["covariance_min_eigenvalue"] = cov.min_eigenvalue;
        s["covariance_repaired"] = cov.repaired;
        s["limit_covariance_max_gap"] = gap;
    }
    return {csv.str(), s};
}

void emit(const RunConfig& c, const std::string& csv, const Json& summary, std::ostream& out) {
    if (c.out.empty()) {
        out << (csv.empty() ? summary.dump(2) + "\n" : csv);
        return;
    }
    if (!csv.empty()) {
        write_file(c.out + ".csv", csv);
    }
    write_file(c.out + ".json", summary.dump(2) + "\n");
    out << summary.dump(2) << '\n';
}

void command_band(const RunConfig& c, bool diagnostics, std::ostream& out) {
    const ManufacturedCase mc = load_case(c);
    const BandOutput b = mc.is_fredholm() ? fredholm_band(c, mc, diagnostics) : volterra_band(c, mc, diagnostics);
    emit(c, b.csv, b.summary, out);
}

void command_rate(const RunConfig& c, std::ostream& out) {
    const ManufacturedCase mc = load_case(c);
    const RandomStream stream(c.seed);
    StudyOptions options;
    options.schedule = c.schedule;
    const RateStudyResult r = mc.is_fredholm()
                                  ? rate_study(mc.fredholm().problem, c.m, c.N, c.replications, stream, options)
                                  : rate_study(mc.volterra().problem, c.m, c.N, c.replications, stream, options);
    Json s = run_metadata("rate", c, mc);
    s["replications"] = c.replications;
    std::ostringstream csv;
    csv << "N,median_error\n";
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        rows.push_back(Json{{"N", row.N}, {"median_error", row.median_error}});
        csv << row.N << ',' << number(row.median_error) << '\n';
    }
    s["rows"] = rows;
    s["slope"] = r.slope ? Json(*r.slope) : Json(nullptr);
    if (!r.note.empty()) {
        s["note"] = r.note;
    }
    if (c.out.empty()) {
        out << s.dump(2) << '\n';
        return;
    }
    emit(c, csv.str(), s, out);
}

void command_coverage(const RunConfig& c, std::ostream& out) {
    const ManufacturedCase mc = load_case(c);
    const std::int64_t N = single_budget(c);
    const RandomStream stream(c.seed);
    StudyOptions options;
    options.schedule = c.schedule;
    const CoverageResult r =
        mc.is_fredholm()
            ? coverage_study(mc.fredholm().problem, c.m, N, c.level, c.replications, stream, options,
                             mc.fredholm().reference)
            : coverage_study(mc.volterra().problem, c.m, N, c.level, c.replications, stream, options,
                             mc.volterra().reference);
    Json s = run_metadata("coverage", c, mc);
    s["N"] = N;
    s["q"] = make_schedule(c.schedule, N, c.m).sizes;
    s["level"] = c.level;
    s["replications"] = r.replications;
    s["covered"] = r.covered;
    s["coverage"] = r.coverage;
    s["reference_coverage"] = r.reference_coverage ? Json(*r.reference_coverage) : Json(nullptr);
    s["widening"] = r.widening;
    s["mean_halfwidth"] = r.mean_halfwidth;
    emit(c, "", s, out);
}

void command_partition(const Flags& f, std::ostream& out) {
    if (!f.N) {
        field_error("N", "is required");
    }
    const std::vector<std::int64_t> budgets = parse_budget_list(*f.N, "N");
    if (budgets.size() != 1) {
        field_error("N", "this command takes a single budget");
    }
    const std::int64_t N = budgets.front();
    const int m = f.m.value_or(3);
    if (m < 1) {
        field_error("m", "must be a positive integer");
    }
    const ScheduleKind kind = parse_schedule_kind(f.schedule.value_or("uniform"));

    Json j;
    PartitionSchedule schedule;
    if (kind == ScheduleKind::paper_optimal) {
        std::vector<double> constants;
        if (f.constants) {
            std::stringstream list(*f.constants);
            for (std::string item; std::getline(list, item, ',');) {
                double v = 0.0;
                const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
                if (ec != std::errc() || ptr != item.data() + item.size() || !(v > 0.0)) {
                    field_error("constants", "expected a comma-separated list of positive numbers");
                }
                constants.push_back(v);
            }
        }
        const PaperOptimalSizes sizes = paper_optimal_partition(N, m, constants);
        schedule = PartitionSchedule::from_sizes(N, sizes.sizes);
    } else {
        schedule = make_schedule(kind, N, m);
    }
    const PartitionReport report = validate_partition(schedule);
    j["q"] = schedule.sizes;
    j["sum"] = report.sum;
    j["budget"] = N;
    if (report.sum != N) {
        j["warning"] = "sum != budget";
    }
    if (f.report) {
        Json r;
        r["objective"] = allocation_objective(schedule.sizes);
        r["min_size"] = report.min_size;
        r["last_stage_ratio"] = report.last_stage_ratio;
        r["gamma_min"] = report.gamma_min;
        r["gamma_max"] = report.gamma_max;
        r["violations"] = report.violations;
        j["report"] = r;
    }
    out << j.dump() << '\n';
}

void command_cases(std::ostream& out) {
    Json list = Json::array();
    for (const std::string& id : registered_case_ids()) {
        const ManufacturedCase mc = manufactured_case(id);
        list.push_back(Json{{"id", id}, {"kind", mc.is_fredholm() ? "fredholm" : "volterra"}, {"description", mc.description}});
    }
    out << Json{{"cases", list}}.dump(2) << '\n';
}

void add_run_flags(CLI::App& sub, Flags& f) {
    sub.add_option("--config", f.config, "JSON config file; flags override its values");
    sub.add_option("--case", f.case_id, "registered case id");
    sub.add_option("--N", f.N, "sample budget (comma-separated list for rate)");
    sub.add_option("--m", f.m, "number of stages");
    sub.add_option("--schedule", f.schedule, "uniform | budget-consistent");
    sub.add_option("--seed", f.seed, "random seed");
    sub.add_option("--level", f.level, "confidence level in (0, 1)");
    sub.add_option("--reps", f.reps, "replications");
    sub.add_option("--grid", f.grid, "evaluation grid points per axis");
    sub.add_option("--tau-grid", f.tau_grid, "tau grid points (Volterra cases)");
    sub.add_option("--out", f.out, "output prefix; writes PREFIX.csv and PREFIX.json");
    sub.add_option("--threads", f.threads, "worker threads (0 = all cores)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Monte-Carlo solver for Fredholm and Volterra integral equations", "mcie"};
    app.require_subcommand(1, 1);
    Flags f;
    CLI::App* solve = app.add_subcommand("solve", "solve one case and print the per-point table");
    CLI::App* band = app.add_subcommand("band", "solve one case and report band diagnostics");
    CLI::App* rate = app.add_subcommand("rate", "convergence-rate study over several budgets");
    CLI::App* coverage = app.add_subcommand("coverage", "empirical coverage of the confidence band");
    CLI::App* partition = app.add_subcommand("partition", "print a stage-size schedule as JSON");
    CLI::App* cases = app.add_subcommand("cases", "list the registered cases");
    for (CLI::App* sub : {solve, band, rate, coverage}) {
        add_run_flags(*sub, f);
    }
    partition->add_option("--N", f.N, "sample budget")->required();
    partition->add_option("--m", f.m, "number of stages");
    partition->add_option("--schedule", f.schedule, "uniform | paper-optimal | budget-consistent");
    partition->add_option("--constants", f.constants, "comma-separated C_1..C_m for paper-optimal");
    partition->add_flag("--report", f.report, "include the validation report");

    std::vector<const char*> argv;
    for (const std::string& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        parallel::ScopedWorkers workers(f.threads);
        if (cases->parsed()) {
            command_cases(out);
        } else if (partition->parsed()) {
            command_partition(f, out);
        } else {
            const RunConfig c = effective_config(f);
            if (solve->parsed()) {
                command_band(c, false, out);
            } else if (band->parsed()) {
                command_band(c, true, out);
            } else if (rate->parsed()) {
                command_rate(c, out);
            } else {
                command_coverage(c, out);
            }
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace mcie::cli
