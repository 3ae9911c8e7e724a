#pragma once

// Command implementations for the `iss` executable. Kept in a header so the
// test suite can drive the commands in-process.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iss/iss.hpp"

namespace iss::cli {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

inline LogLevel log_level_from_env() {
    const char* v = std::getenv("ISS_LOG");
    if (!v) return LogLevel::Error;
    const std::string s(v);
    if (s == "debug") return LogLevel::Debug;
    if (s == "info") return LogLevel::Info;
    return LogLevel::Error;
}

class Logger {
public:
    Logger(std::ostream& err, LogLevel level) : err_(err), level_(level) {}
    void info(const std::string& msg) const { emit(LogLevel::Info, "info", msg); }
    void debug(const std::string& msg) const { emit(LogLevel::Debug, "debug", msg); }
    void error(const std::string& msg) const { err_ << "error: " << msg << '\n'; }

private:
    void emit(LogLevel at, const char* tag, const std::string& msg) const {
        if (static_cast<int>(level_) >= static_cast<int>(at)) err_ << tag << ": " << msg << '\n';
    }
    std::ostream& err_;
    LogLevel level_;
};

// Write to a sibling temporary and rename over the target.
inline void write_atomic(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(out), "cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        require(static_cast<bool>(out), "failed writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    require(!ec, "cannot rename onto '" + path + "': " + ec.message());
}

inline void emit_output(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
    } else {
        write_atomic(path, content);
    }
}

inline std::vector<double> parse_point(const std::string& text) {
    std::vector<double> coords;
    for (const auto& field : detail::split_fields(text, ',')) {
        auto v = detail::parse_real(field);
        require(v.has_value(), "--at: '" + field + "' is not a finite number");
        coords.push_back(*v);
    }
    require(!coords.empty(), "--at needs at least one coordinate");
    return coords;
}

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct SelectArgs {
    std::string input, out, debug_responses;
    double tau = 0.0, alpha = 0.05, sigma = 0.0, rho = 0.5, theta = 0.5;
    std::size_t m = 0;
    std::string pvalue = "nm", procedure = "iss";
    bool ipw = false, binarize = false;
    std::uint64_t seed = 0;
};

inline int cmd_select(const SelectArgs& a, std::ostream& out, const Logger& log) {
    CsvDataset csv = read_csv_dataset(a.input);
    LabeledSample data = csv.sample;
    require(!data.empty(), "input has no data rows");
    if (a.ipw) {
        require(csv.treatment && csv.propensity, "--ipw requires 't' and 'pi' columns");
        data = ipw_sample(data, *csv.treatment, *csv.propensity);
    }
    if (a.binarize) data = binarize_nonneg(data);
    if (!a.debug_responses.empty()) {
        std::ostringstream dump;
        for (double y : data.responses()) dump << format_real(y) << '\n';
        emit_output(a.debug_responses, dump.str(), out);
    }
    const PValueKind kind = make_pvalue_kind(a.pvalue, a.rho, a.theta);
    const Procedure procedure = parse_procedure(a.procedure);
    const std::size_t m = a.m == 0 ? data.size() : a.m;
    if (kind.needs_sigma()) require(a.sigma > 0.0, "--sigma is required and must be positive for this p-value");
    log.info("select: n=" + std::to_string(data.size()) + " d=" + std::to_string(data.dim()) +
             " m=" + std::to_string(m) + " pvalue=" + a.pvalue + " procedure=" + a.procedure);

    SelectedUpperSet sel = (procedure == Procedure::Split || procedure == Procedure::SplitOracle)
                               ? (require(procedure == Procedure::Split, "split-or needs a truth oracle"),
                                  select_split(data, a.tau, a.alpha, a.sigma, kind))
                               : select_iss(data, a.tau, a.alpha, a.sigma, m, kind, procedure);
    log.info("select: " + std::to_string(sel.generator_indices().size()) + " rejections, " +
             std::to_string(sel.minimal_points().size()) + " minimal points");
    emit_output(a.out, to_json(sel).dump(2) + "\n", out);
    return 0;
}

struct SimulateArgs {
    std::string config, out;
    std::size_t threads = 1;
    bool timing = false;
};

inline int cmd_simulate(const SimulateArgs& a, std::ostream& out, const Logger& log) {
    StudyConfig config = parse_study_config(detail::read_file(a.config));
    config.timing = a.timing;
    log.info("simulate: " + std::to_string(config.scenarios.size() * config.sample_sizes.size()) + " data cells, " +
             std::to_string(config.replicates) + " replicates, " + std::to_string(a.threads) + " threads");
    const StudyReport report = run_study(config, a.threads);
    for (const auto& row : report.rows) {
        if (row.status != "ok") log.error("cell " + row.scenario + "/" + row.procedure + "/" + row.kind + ": " + row.status);
    }
    emit_output(a.out, report.to_csv(), out);
    return 0;
}

struct PValueArgs {
    std::string input, at, pvalue = "nm";
    double tau = 0.0, sigma = 0.0, rho = 0.5, theta = 0.5;
};

inline int cmd_pvalue(const PValueArgs& a, std::ostream& out, const Logger&) {
    const CsvDataset csv = read_csv_dataset(a.input);
    const auto center = parse_point(a.at);
    require(center.size() == csv.sample.dim(), "--at has " + std::to_string(center.size()) +
                                                   " coordinates but the data has d = " +
                                                   std::to_string(csv.sample.dim()));
    const PValueKind kind = make_pvalue_kind(a.pvalue, a.rho, a.theta);
    const PValueReport r = evaluate_pvalue(center, csv.sample, kind, a.sigma, a.tau);
    out << "p = " << format_real(r.p) << '\n';
    out << "n(x) = " << r.trace.count() << '\n';
    out << "argmin_k = " << r.log.argmin_k << '\n';
    out << "indices =";
    for (Index i : r.trace.ordering.indices) out << ' ' << (i + 1);
    out << "\nS =";
    for (double s : r.trace.partial_sums) out << ' ' << format_real(s);
    out << '\n';
    return 0;
}

struct DagArgs {
    std::string input, out;
    std::size_t m = 0;
};

inline int cmd_dag(const DagArgs& a, std::ostream& out, const Logger& log) {
    const CsvDataset csv = read_csv_dataset(a.input);
    const std::size_t m = a.m == 0 ? csv.sample.size() : a.m;
    require(m <= csv.sample.size(), "--m exceeds the number of rows");
    const WeightedDag dag = induced_weighted_dag(points_of(csv.sample, m));
    log.info("dag: " + std::to_string(m) + " nodes, " + std::to_string(dag.edges().size()) + " edges");
    emit_output(a.out, serialize_edges(dag), out);
    return 0;
}

/// Entry point; `args` excludes the program name. Returns the exit code.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const Logger log(err, log_level_from_env());
    CLI::App app{"Isotonic subgroup selection"};
    app.name("iss");
    app.require_subcommand(1);

    SelectArgs sel;
    auto* select = app.add_subcommand("select", "Select an upper set on which the regression function exceeds tau");
    select->add_option("--input", sel.input, "CSV with x* columns, y, optional t and pi")->required();
    select->add_option("--tau", sel.tau, "Threshold")->required();
    select->add_option("--alpha", sel.alpha, "Familywise error level")->capture_default_str();
    select->add_option("--sigma", sel.sigma, "Noise scale (lil, nm)");
    select->add_option("--m", sel.m, "Number of tested points (default n)");
    select->add_option("--pvalue", sel.pvalue, "lil, nm, gauss-var, beta, quantile-lil, quantile-beta")
        ->capture_default_str();
    select->add_option("--rho", sel.rho, "Normal-mixture parameter")->capture_default_str();
    select->add_option("--theta", sel.theta, "Quantile level")->capture_default_str();
    select->add_option("--procedure", sel.procedure, "iss, holm, mg-all, mg-any, fs, split")->capture_default_str();
    select->add_flag("--ipw", sel.ipw, "Inverse-propensity weight the responses using t and pi");
    select->add_flag("--binarize-nonneg", sel.binarize, "Replace responses by 1{y >= 0}");
    select->add_option("--seed", sel.seed, "Accepted for interface uniformity; selection is deterministic");
    select->add_option("--out", sel.out, "Output JSON path (default stdout)");
    select->add_option("--debug-responses", sel.debug_responses, "Dump the transformed responses to this path");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run a replicated simulation study");
    simulate->add_option("--config", sim.config, "Study config file")->required();
    simulate->add_option("--out", sim.out, "Report CSV path (default stdout)");
    simulate->add_option("--threads", sim.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    simulate->add_flag("--timing", sim.timing, "Record wall-clock time per cell (makes reports non-reproducible)");

    PValueArgs pv;
    auto* pvalue = app.add_subcommand("pvalue", "Evaluate one p-value and print its martingale trace");
    pvalue->add_option("--input", pv.input, "CSV dataset")->required();
    pvalue->add_option("--at", pv.at, "Point, comma separated")->required();
    pvalue->add_option("--tau", pv.tau, "Threshold")->required();
    pvalue->add_option("--sigma", pv.sigma, "Noise scale (lil, nm)");
    pvalue->add_option("--pvalue", pv.pvalue, "p-value kind")->capture_default_str();
    pvalue->add_option("--rho", pv.rho, "Normal-mixture parameter")->capture_default_str();
    pvalue->add_option("--theta", pv.theta, "Quantile level")->capture_default_str();

    DagArgs dg;
    auto* dag = app.add_subcommand("dag", "Dump the induced polyforest-weighted DAG");
    dag->add_option("--input", dg.input, "CSV dataset")->required();
    dag->add_option("--m", dg.m, "Number of points (default n)");
    dag->add_option("--out", dg.out, "Edge list path (default stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        log.error(e.what());
        return 2;
    }

    try {
        if (select->parsed()) return cmd_select(sel, out, log);
        if (simulate->parsed()) return cmd_simulate(sim, out, log);
        if (pvalue->parsed()) return cmd_pvalue(pv, out, log);
        if (dag->parsed()) return cmd_dag(dg, out, log);
    } catch (const invariant_error& e) {
        log.error(std::string("internal: ") + e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        log.error(e.what());
        return 2;
    } catch (const std::exception& e) {
        log.error(std::string("internal: ") + e.what());
        return 3;
    }
    return 2;
}

}  // namespace iss::cli
