#pragma once

// Replicated simulation study: for every (scenario, n) data cell and every
// replicate, one dataset and one set of regret draws are shared by all
// (procedure, kind) pairs. Results are aggregated in a fixed order, so the
// report does not depend on the number of worker threads.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "iss/dag.hpp"
#include "iss/pvalues.hpp"
#include "iss/rng.hpp"
#include "iss/scenarios.hpp"
#include "iss/select.hpp"
#include "iss/split.hpp"

namespace iss {

struct StudyConfig {
    std::vector<ScenarioSpec> scenarios;
    std::vector<std::size_t> sample_sizes;
    std::vector<Procedure> procedures;
    std::vector<PValueKind> kinds;
    double alpha = 0.05;
    std::size_t replicates = 100;
    std::size_t draws = 100000;
    std::uint64_t seed = 1;
    bool timing = false;

    void validate() const {
        require(!scenarios.empty(), "study needs at least one scenario");
        require(!sample_sizes.empty(), "study needs at least one sample size");
        require(!procedures.empty(), "study needs at least one procedure");
        require(!kinds.empty(), "study needs at least one p-value kind");
        require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
        require(replicates >= 1, "replicates must be >= 1");
        require(draws >= 1, "draws must be >= 1");
        for (std::size_t n : sample_sizes) require(n >= 1, "sample sizes must be >= 1");
        for (Procedure p : procedures) {
            require(p != Procedure::FixedSequence || std::all_of(scenarios.begin(), scenarios.end(),
                                                                 [](const ScenarioSpec& s) { return s.dim == 1; }),
                    "the fixed-sequence procedure requires d = 1 scenarios");
        }
    }
};

struct StudyRow {
    std::string scenario;
    std::size_t dim = 0;
    std::size_t n = 0;
    std::string procedure;
    std::string kind;
    double mean_regret = 0.0;
    double se_regret = 0.0;
    double typeI_rate = 0.0;
    double wall_ms = 0.0;
    std::string status = "ok";
};

struct StudyReport {
    std::vector<StudyRow> rows;

    std::string to_csv() const {
        std::ostringstream out;
        out << "scenario,d,n,procedure,kind,mean_regret,se_regret,typeI_rate,wall_ms,status\n";
        char buf[64];
        auto num = [&](double v) {
            std::snprintf(buf, sizeof buf, "%.10g", v);
            return std::string(buf);
        };
        for (const StudyRow& r : rows) {
            out << r.scenario << ',' << r.dim << ',' << r.n << ',' << r.procedure << ',' << r.kind << ','
                << num(r.mean_regret) << ',' << num(r.se_regret) << ',' << num(r.typeI_rate) << ','
                << num(r.wall_ms) << ',' << r.status << '\n';
        }
        return out.str();
    }
};

namespace detail {

struct ReplicateOutcome {
    double regret = 0.0;
    bool violated = false;
    double ms = 0.0;
    std::string error;
};

inline std::string sanitize_status(std::string message) {
    for (char& c : message) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return "error: " + message;
}

// One dataset, every (procedure, kind) pair; outcomes ordered kind-major.
inline std::vector<ReplicateOutcome> run_replicate(const StudyConfig& config, const ScenarioSpec& spec,
                                                   std::size_t n, std::uint64_t data_seed,
                                                   std::uint64_t regret_seed) {
    using clock = std::chrono::steady_clock;
    const std::size_t nk = config.kinds.size();
    const std::size_t np = config.procedures.size();
    std::vector<ReplicateOutcome> out(nk * np);

    const LabeledSample data = sample_dataset(spec, n, data_seed);
    const RegretSample regret = make_regret_sample(spec, config.draws, regret_seed);
    const auto points = points_of(data, n);

    const bool any_dag = std::any_of(config.procedures.begin(), config.procedures.end(), needs_dag);
    std::optional<WeightedDag> dag;
    double dag_ms = 0.0;
    if (any_dag) {
        const auto t0 = clock::now();
        dag.emplace(induced_weighted_dag(points));
        dag_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    }

    for (std::size_t k = 0; k < nk; ++k) {
        const PValueKind& kind = config.kinds[k];
        std::optional<PValueVector> pv;
        std::string pv_error;
        double pv_ms = 0.0;
        auto record = [&](std::size_t j, const SelectedUpperSet& sel, double ms) {
            auto& o = out[k * np + j];
            o.regret = regret.evaluate(sel).estimate;
            o.violated = typeI_violation(sel, spec).violated;
            o.ms = ms;
        };
        for (std::size_t j = 0; j < np; ++j) {
            const Procedure proc = config.procedures[j];
            try {
                const auto t0 = clock::now();
                if (proc == Procedure::Split || proc == Procedure::SplitOracle) {
                    std::optional<TruthFunction> oracle;
                    if (proc == Procedure::SplitOracle) {
                        oracle = [&spec](PointView x) { return regression_value(spec, x); };
                    }
                    const auto sel = select_split(data, spec.tau, config.alpha, spec.sigma, kind, oracle);
                    record(j, sel, std::chrono::duration<double, std::milli>(clock::now() - t0).count());
                    continue;
                }
                if (!pv && pv_error.empty()) {
                    try {
                        pv = pvalue_batch(data, n, kind, spec.sigma, spec.tau);
                    } catch (const std::invalid_argument& e) {
                        pv_error = e.what();
                    }
                    pv_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
                }
                if (!pv) throw std::invalid_argument(pv_error);
                const auto t1 = clock::now();
                auto rejected = run_procedure(proc, points, dag ? &*dag : nullptr, pv->values, config.alpha);
                const SelectedUpperSet sel(points, std::move(rejected),
                                           {spec.tau, config.alpha, spec.sigma, n, kind, proc});
                const double own = std::chrono::duration<double, std::milli>(clock::now() - t1).count();
                record(j, sel, pv_ms + own + (needs_dag(proc) ? dag_ms : 0.0));
            } catch (const std::invalid_argument& e) {
                out[k * np + j].error = e.what();
            }
        }
    }
    return out;
}

}  // namespace detail

inline StudyReport run_study(const StudyConfig& config, std::size_t threads = 1) {
    config.validate();
    const std::size_t cells = config.scenarios.size() * config.sample_sizes.size();
    const std::size_t reps = config.replicates;
    const std::size_t tasks = cells * reps;
    std::vector<std::vector<detail::ReplicateOutcome>> results(tasks);

    auto run_task = [&](std::size_t t) {
        const std::size_t cell = t / reps;
        const std::size_t rep = t % reps;
        const ScenarioSpec& spec = config.scenarios[cell / config.sample_sizes.size()];
        const std::size_t n = config.sample_sizes[cell % config.sample_sizes.size()];
        results[t] = detail::run_replicate(config, spec, n, derive_seed(config.seed, {cell, rep, 0}),
                                           derive_seed(config.seed, {cell, rep, 1}));
    };

    threads = std::max<std::size_t>(1, std::min(threads, tasks));
    if (threads == 1) {
        for (std::size_t t = 0; t < tasks; ++t) run_task(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(threads);
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t t = next++; t < tasks; t = next++) run_task(t);
                } catch (...) {
                    errors[w] = std::current_exception();
                    next = tasks;
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    StudyReport report;
    const std::size_t np = config.procedures.size();
    for (std::size_t cell = 0; cell < cells; ++cell) {
        const ScenarioSpec& spec = config.scenarios[cell / config.sample_sizes.size()];
        const std::size_t n = config.sample_sizes[cell % config.sample_sizes.size()];
        for (std::size_t j = 0; j < np; ++j) {
            for (std::size_t k = 0; k < config.kinds.size(); ++k) {
                StudyRow row;
                row.scenario = to_string(spec.id);
                row.dim = spec.dim;
                row.n = n;
                row.procedure = to_string(config.procedures[j]);
                row.kind = to_string(config.kinds[k]);
                double sum = 0.0, sum_sq = 0.0, violations = 0.0, ms = 0.0;
                std::string error;
                for (std::size_t rep = 0; rep < reps; ++rep) {
                    const auto& o = results[cell * reps + rep][k * np + j];
                    if (!o.error.empty()) {
                        error = o.error;
                        break;
                    }
                    sum += o.regret;
                    violations += o.violated ? 1.0 : 0.0;
                    ms += o.ms;
                }
                if (!error.empty()) {
                    row.mean_regret = row.se_regret = row.typeI_rate = std::nan("");
                    row.status = detail::sanitize_status(error);
                    report.rows.push_back(std::move(row));
                    continue;
                }
                const double r = static_cast<double>(reps);
                row.mean_regret = sum / r;
                for (std::size_t rep = 0; rep < reps; ++rep) {
                    const double dev = results[cell * reps + rep][k * np + j].regret - row.mean_regret;
                    sum_sq += dev * dev;
                }
                row.se_regret = reps > 1 ? std::sqrt(sum_sq / (r - 1.0) / r) : 0.0;
                row.typeI_rate = violations / r;
                row.wall_ms = config.timing ? ms / r : 0.0;
                report.rows.push_back(std::move(row));
            }
        }
    }
    return report;
}

}  // namespace iss
