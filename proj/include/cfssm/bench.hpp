#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cfssm/models.hpp"

namespace cfssm {

/// One of the compared estimators: a fixed-structure filter, the
/// structure-switching filter, or the IMM baseline.
struct MethodId {
    enum class Kind { fixed, cf, imm };
    Kind kind = Kind::cf;
    int structure_id = -1;  // meaningful for fixed only

    static MethodId fixed(int structure_id) { return {Kind::fixed, structure_id}; }
    static MethodId cf() { return {Kind::cf, -1}; }
    static MethodId imm() { return {Kind::imm, -1}; }

    std::string label(const ModelBank& bank) const;
    /// Parses "cf", "imm", "fixed_<label>" or "fixed_<id>".
    static std::optional<MethodId> parse(const std::string& text, const ModelBank& bank);

    friend bool operator==(const MethodId& a, const MethodId& b) {
        return a.kind == b.kind && (a.kind != Kind::fixed || a.structure_id == b.structure_id);
    }
};

/// All methods a scenario supports, in report order: fixed filters in bank
/// order, then IMM (when configured), then CF.
std::vector<MethodId> default_methods(const Scenario& sc);

struct TraceRow {
    int t = 0;
    StateVec z_true;
    StateVec z_hat;
    int active_structure = 0;
    std::vector<double> phi;  // per-structure score; NaN when not evaluated
    double loglik = 0.0;      // committed innovation log-likelihood estimate
    double ess = 0.0;
};

struct RunResult {
    MethodId method;
    int run_index = 0;
    std::vector<TraceRow> trace;
    double rmse = 0.0;
    double phi_bar = 0.0;
    double switch_rate = 0.0;
};

/// sqrt(mean ||z_hat - z_true||^2) over the trace.
double rmse(std::span<const TraceRow> trace);

/// Mean of the active structure's raw score over the first T-1 steps.
double phi_bar(std::span<const TraceRow> trace);

/// One method on one run. The truth is generated from the (data, run)
/// stream and the filter from (belief/score/init/mix, run) streams, so all
/// methods of a run consume identical data while candidate scoring never
/// touches the committed filter's stream.
RunResult run_method(const Scenario& sc, const MethodId& method, int run_index,
                     std::uint64_t master_seed);

struct MethodSummary {
    MethodId method;
    std::string method_label;
    int runs = 0;
    double rmse_mean = 0.0, rmse_se = 0.0;
    double phi_bar_mean = 0.0, phi_bar_se = 0.0;
    double switch_rate_mean = 0.0, switch_rate_se = 0.0;
};

struct Summary {
    std::string scenario;
    std::uint64_t seed = 0;
    std::vector<MethodSummary> methods;
};

/// M independent runs per method, optionally across worker threads.
/// The result is a pure function of (scenario, methods, M, seed): the
/// aggregation order is fixed by run index, so any parallelism degree
/// produces identical output. Set `keep_runs` to also collect the
/// per-run results (in method-major, run-minor order).
Summary monte_carlo(const Scenario& sc, std::span<const MethodId> methods, int num_runs,
                    std::uint64_t master_seed, int parallelism,
                    std::vector<RunResult>* keep_runs = nullptr);

}  // namespace cfssm
