#pragma once

// Text formats: CSV datasets, study config files, selection JSON.

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "iss/common.hpp"
#include "iss/geometry.hpp"
#include "iss/pvalues.hpp"
#include "iss/scenarios.hpp"
#include "iss/select.hpp"
#include "iss/study.hpp"

namespace iss {

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_fields(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) out.push_back(trim(field));
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

inline std::optional<double> parse_real(const std::string& text) {
    if (text.empty()) return std::nullopt;
    double v = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// CSV datasets: header row; covariates are the columns whose name starts with
// 'x' (in header order), response 'y', optional 't' and 'pi'.

struct CsvDataset {
    LabeledSample sample;
    std::vector<std::string> covariate_names;
    std::optional<std::vector<int>> treatment;
    std::optional<std::vector<double>> propensity;
};

inline CsvDataset parse_csv_dataset(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": " + msg);
    };

    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        header = detail::split_fields(line, ',');
        break;
    }
    if (header.empty()) {
        line_no = std::max<std::size_t>(line_no, 1);
        fail("missing header row");
    }

    std::vector<std::size_t> xcols;
    std::optional<std::size_t> ycol, tcol, picol;
    CsvDataset out;
    std::map<std::string, int> seen;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string& name = header[c];
        if (name.empty()) fail("empty column name");
        if (seen[name]++) fail("duplicate column '" + name + "'");
        if (name == "y") ycol = c;
        else if (name == "t") tcol = c;
        else if (name == "pi") picol = c;
        else if (name[0] == 'x') {
            xcols.push_back(c);
            out.covariate_names.push_back(name);
        }
    }
    if (xcols.empty()) fail("no covariate columns (names starting with 'x')");
    if (!ycol) fail("missing response column 'y'");

    out.sample = LabeledSample(xcols.size());
    std::vector<int> t;
    std::vector<double> pi;
    std::vector<double> x(xcols.size());
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_fields(line, ',');
        if (fields.size() != header.size()) {
            fail("expected " + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
        }
        auto num = [&](std::size_t c) {
            auto v = detail::parse_real(fields[c]);
            if (!v) fail("column '" + header[c] + "' is not a finite number: '" + fields[c] + "'");
            return *v;
        };
        for (std::size_t j = 0; j < xcols.size(); ++j) x[j] = num(xcols[j]);
        const double y = num(*ycol);
        if (tcol) {
            const double tv = num(*tcol);
            if (tv != 0.0 && tv != 1.0) fail("treatment 't' must be 0 or 1");
            t.push_back(static_cast<int>(tv));
        }
        if (picol) pi.push_back(num(*picol));
        out.sample.push_back(x, y);
    }
    if (tcol) out.treatment = std::move(t);
    if (picol) out.propensity = std::move(pi);
    return out;
}

inline CsvDataset read_csv_dataset(const std::string& path) { return parse_csv_dataset(detail::read_file(path)); }

// ---------------------------------------------------------------------------
// Study config: "key = value" lines, '#' comments, lists comma-separated.
//
//   scenarios   = a,b,bottleneck       (required)
//   dimensions  = 2,3                  (required; crossed with scenarios)
//   n           = 500,1000             (required)
//   procedures  = iss,holm,mg-all,mg-any,split,split-or   (default iss)
//   kinds       = nm,lil               (default nm)
//   sigma       = 0.25                 (default by d: 1/4, 1/16, 1/64)
//   tau         = 0.5                  (default per scenario)
//   alpha = 0.05   replicates = 100   draws = 100000   seed = 1
//   rho = 0.5      theta = 0.5
//   bottleneck_q = 5  bottleneck_M = 1  bottleneck_lambda = 1  bottleneck_gamma = 1

inline StudyConfig parse_study_config(const std::string& text) {
    std::map<std::string, std::pair<std::string, std::size_t>> entries;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    static const std::vector<std::string> known = {
        "scenarios", "dimensions", "n",     "procedures", "kinds", "sigma", "tau", "alpha", "replicates", "draws",
        "seed",      "rho",        "theta", "bottleneck_q", "bottleneck_M", "bottleneck_lambda", "bottleneck_gamma"};
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (detail::trim(line).empty()) continue;
        const auto eq = line.find('=');
        const std::string where = "line " + std::to_string(line_no) + ": ";
        if (eq == std::string::npos) throw std::invalid_argument(where + "expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw std::invalid_argument(where + "unknown key '" + key + "'");
        }
        if (entries.count(key)) throw std::invalid_argument(where + "duplicate key '" + key + "'");
        if (value.empty()) throw std::invalid_argument(where + "empty value for '" + key + "'");
        entries[key] = {value, line_no};
    }

    auto where = [&](const std::string& key) { return "line " + std::to_string(entries.at(key).second) + ": "; };
    auto list = [&](const std::string& key) { return detail::split_fields(entries.at(key).first, ','); };
    auto real = [&](const std::string& key, double fallback) {
        if (!entries.count(key)) return fallback;
        auto v = detail::parse_real(entries.at(key).first);
        if (!v) throw std::invalid_argument(where(key) + "'" + key + "' must be a finite number");
        return *v;
    };
    auto count = [&](const std::string& key, std::uint64_t fallback) -> std::uint64_t {
        if (!entries.count(key)) return fallback;
        const std::string& s = entries.at(key).first;
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            throw std::invalid_argument(where(key) + "'" + key + "' must be a non-negative integer");
        }
        return v;
    };
    auto counts = [&](const std::string& key) {
        std::vector<std::size_t> out;
        for (const auto& s : list(key)) {
            std::size_t v = 0;
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || ptr != s.data() + s.size() || v == 0) {
                throw std::invalid_argument(where(key) + "'" + key + "' must list positive integers");
            }
            out.push_back(v);
        }
        return out;
    };
    for (const char* key : {"scenarios", "dimensions", "n"}) {
        if (!entries.count(key)) throw std::invalid_argument(std::string("missing required key '") + key + "'");
    }

    StudyConfig config;
    try {
        BottleneckParams bp;
        bp.q = static_cast<int>(count("bottleneck_q", 5));
        bp.M = real("bottleneck_M", 1.0);
        bp.lambda = real("bottleneck_lambda", 1.0);
        bp.gamma = real("bottleneck_gamma", 1.0);
        std::optional<double> sigma, tau;
        if (entries.count("sigma")) sigma = real("sigma", 0.0);
        if (entries.count("tau")) tau = real("tau", 0.0);
        const auto dims = counts("dimensions");
        for (const auto& name : list("scenarios")) {
            const ScenarioId id = parse_scenario_id(name);
            for (std::size_t d : dims) config.scenarios.push_back(make_scenario(id, d, sigma, tau, bp));
        }
        config.sample_sizes = counts("n");
        const double rho = real("rho", 0.5);
        const double theta = real("theta", 0.5);
        if (entries.count("procedures")) {
            for (const auto& name : list("procedures")) config.procedures.push_back(parse_procedure(name));
        } else {
            config.procedures = {Procedure::ISS};
        }
        if (entries.count("kinds")) {
            for (const auto& name : list("kinds")) config.kinds.push_back(make_pvalue_kind(name, rho, theta));
        } else {
            config.kinds = {PValueKind::normal_mixture(rho)};
        }
        config.alpha = real("alpha", 0.05);
        config.replicates = count("replicates", 100);
        config.draws = count("draws", 100000);
        config.seed = count("seed", 1);
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    return config;
}

// ---------------------------------------------------------------------------
// Selection JSON. Keys are emitted in sorted order; indices are 1-based.

inline nlohmann::json to_json(const SelectedUpperSet& selection) {
    nlohmann::json j;
    const auto& meta = selection.metadata();
    j["tau"] = meta.tau;
    j["alpha"] = meta.alpha;
    j["sigma"] = meta.sigma;
    j["m"] = meta.m;
    j["pvalue"] = to_string(meta.kind);
    if (meta.kind.family == PValueFamily::NormalMixture) j["rho"] = meta.kind.rho;
    if (is_quantile(meta.kind)) j["theta"] = meta.kind.theta;
    j["procedure"] = to_string(meta.procedure);
    j["minimal_points"] = nlohmann::json::array();
    for (const Point& p : selection.minimal_points()) j["minimal_points"].push_back(p.coords());
    j["generator_indices"] = nlohmann::json::array();
    for (Index i : selection.generator_indices()) j["generator_indices"].push_back(i + 1);
    return j;
}

}  // namespace iss
