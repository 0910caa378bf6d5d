#include "cfssm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "cfssm/errors.hpp"

namespace cfssm {

namespace {
constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

int argmax(std::span<const double> v) {
    int best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
    return best;
}

void finalize_metrics(RunResult& r) {
    r.rmse = rmse(r.trace);
    r.phi_bar = phi_bar(r.trace);
    std::vector<int> seq(r.trace.size());
    for (std::size_t i = 0; i < seq.size(); ++i) seq[i] = r.trace[i].active_structure;
    r.switch_rate = switch_rate(seq);
}
}  // namespace

std::string MethodId::label(const ModelBank& bank) const {
    switch (kind) {
        case Kind::cf: return "cf";
        case Kind::imm: return "imm";
        case Kind::fixed: return "fixed_" + bank[structure_id].label;
    }
    return "?";
}

std::optional<MethodId> MethodId::parse(const std::string& text, const ModelBank& bank) {
    if (text == "cf") return MethodId::cf();
    if (text == "imm") return MethodId::imm();
    if (text.rfind("fixed_", 0) == 0) {
        const std::string tail = text.substr(6);
        for (int s = 0; s < bank.size(); ++s)
            if (bank[s].label == tail) return MethodId::fixed(s);
        try {
            const int id = std::stoi(tail);
            if (id >= 0 && id < bank.size()) return MethodId::fixed(id);
        } catch (...) {
        }
    }
    return std::nullopt;
}

std::vector<MethodId> default_methods(const Scenario& sc) {
    std::vector<MethodId> out;
    for (int s = 0; s < sc.bank.size(); ++s) out.push_back(MethodId::fixed(s));
    if (sc.imm) out.push_back(MethodId::imm());
    out.push_back(MethodId::cf());
    return out;
}

double rmse(std::span<const TraceRow> trace) {
    if (trace.empty()) throw InvalidInputError("rmse: empty trace");
    double acc = 0.0;
    for (const TraceRow& row : trace) acc += row.z_hat.squared_distance(row.z_true);
    return std::sqrt(acc / static_cast<double>(trace.size()));
}

double phi_bar(std::span<const TraceRow> trace) {
    if (trace.size() < 2) throw InvalidInputError("phi_bar: needs at least two steps");
    double acc = 0.0;
    const std::size_t n = trace.size() - 1;
    for (std::size_t i = 0; i < n; ++i)
        acc += trace[i].phi[static_cast<std::size_t>(trace[i].active_structure)];
    return acc / static_cast<double>(n);
}

namespace {
RunResult run_method_impl(const Scenario& sc, const MethodId& method, int run_index,
                          std::uint64_t master_seed, int& step_marker);
}

RunResult run_method(const Scenario& sc, const MethodId& method, int run_index,
                     std::uint64_t master_seed) {
    if (method.kind == MethodId::Kind::fixed &&
        (method.structure_id < 0 || method.structure_id >= sc.bank.size()))
        throw InvalidInputError("run_method: fixed structure outside the bank");
    if (method.kind == MethodId::Kind::imm && !sc.imm)
        throw InvalidInputError("run_method: scenario has no IMM configuration");
    int step_marker = 0;
    try {
        return run_method_impl(sc, method, run_index, master_seed, step_marker);
    } catch (const std::exception& e) {
        throw std::runtime_error("run " + std::to_string(run_index) + ", step " +
                                 std::to_string(step_marker) + ", method " +
                                 method.label(sc.bank) + ": " + e.what());
    }
}

namespace {
RunResult run_method_impl(const Scenario& sc, const MethodId& method, int run_index,
                          std::uint64_t master_seed, int& step_marker) {
    const RngStreams streams(master_seed);
    const auto run = static_cast<std::uint64_t>(run_index);
    RngStream data = streams.stream(StreamPurpose::data, run);
    const TrueTrajectory truth = simulate_truth(sc, data);
    RngStream init = streams.stream(StreamPurpose::init, run);
    const Belief b0 = initial_belief(sc, init);
    const int n_structures = sc.bank.size();

    RunResult result;
    result.method = method;
    result.run_index = run_index;
    result.trace.reserve(static_cast<std::size_t>(sc.horizon));

    auto make_row = [&](int t) {
        TraceRow row;
        row.t = t;
        row.z_true = truth.states[static_cast<std::size_t>(t - 1)];
        row.phi.assign(static_cast<std::size_t>(n_structures), nan_value);
        return row;
    };

    switch (method.kind) {
        case MethodId::Kind::fixed: {
            RngStream belief_stream = streams.stream(StreamPurpose::belief, run);
            Belief b = b0;
            for (int t = 1; t <= sc.horizon; ++t) {
                step_marker = t;
                const StepOutput step =
                    pf_step(b, sc.bank[method.structure_id], t - 1,
                            truth.observations[static_cast<std::size_t>(t - 1)], belief_stream);
                b = step.posterior;
                TraceRow row = make_row(t);
                row.z_hat = belief_mean(b);
                row.active_structure = method.structure_id;
                row.phi[static_cast<std::size_t>(method.structure_id)] =
                    phi_score(step.innovation_loglik);
                row.loglik = step.innovation_loglik;
                row.ess = step.ess_before_resample;
                result.trace.push_back(std::move(row));
            }
            break;
        }
        case MethodId::Kind::cf: {
            RngStream belief_stream = streams.stream(StreamPurpose::belief, run);
            std::vector<RngStream> score_streams;
            score_streams.reserve(static_cast<std::size_t>(n_structures));
            for (int s = 0; s < n_structures; ++s)
                score_streams.push_back(streams.stream(StreamPurpose::score, run,
                                                       static_cast<std::uint64_t>(s)));
            Belief b = b0;
            CFState state = make_cf_state(n_structures, sc.initial_structure, sc.cf);
            for (int t = 1; t <= sc.horizon; ++t) {
                step_marker = t;
                const CFStepResult step =
                    cf_step(b, state, sc.bank, t - 1,
                            truth.observations[static_cast<std::size_t>(t - 1)], sc.cf,
                            belief_stream, score_streams);
                TraceRow row = make_row(t);
                row.z_hat = belief_mean(b);
                row.active_structure = step.diag.selected;
                row.phi = step.diag.scores;
                row.loglik = step.innovation_loglik;
                row.ess = step.ess_before_resample;
                result.trace.push_back(std::move(row));
            }
            break;
        }
        case MethodId::Kind::imm: {
            std::vector<RngStream> belief_streams;
            std::vector<RngStream> mix_streams;
            for (int s = 0; s < n_structures; ++s) {
                belief_streams.push_back(streams.stream(StreamPurpose::belief, run,
                                                        static_cast<std::uint64_t>(s)));
                mix_streams.push_back(streams.stream(StreamPurpose::mix, run,
                                                     static_cast<std::uint64_t>(s)));
            }
            IMMState state = make_imm_state(n_structures, b0);
            for (int t = 1; t <= sc.horizon; ++t) {
                step_marker = t;
                const IMMStepResult step =
                    imm_step(state, sc.bank, *sc.imm, t - 1,
                             truth.observations[static_cast<std::size_t>(t - 1)], belief_streams,
                             mix_streams);
                TraceRow row = make_row(t);
                row.z_hat = imm_estimate(state);
                row.active_structure = argmax(state.mode_probs);
                for (int s = 0; s < n_structures; ++s)
                    row.phi[static_cast<std::size_t>(s)] =
                        phi_score(step.mode_logliks[static_cast<std::size_t>(s)]);
                row.loglik = step.mixture_loglik;
                double ess_mix = 0.0;
                for (int s = 0; s < n_structures; ++s)
                    ess_mix += state.mode_probs[static_cast<std::size_t>(s)] *
                               effective_sample_size(state.beliefs[static_cast<std::size_t>(s)]);
                row.ess = ess_mix;
                result.trace.push_back(std::move(row));
            }
            break;
        }
    }

    finalize_metrics(result);
    return result;
}
}  // namespace

Summary monte_carlo(const Scenario& sc, std::span<const MethodId> methods, int num_runs,
                    std::uint64_t master_seed, int parallelism,
                    std::vector<RunResult>* keep_runs) {
    if (num_runs < 1) throw InvalidInputError("monte_carlo: needs at least one run");
    if (parallelism < 1) parallelism = 1;

    struct Task {
        std::size_t method_idx;
        int run;
    };
    std::vector<Task> tasks;
    for (std::size_t m = 0; m < methods.size(); ++m)
        for (int r = 0; r < num_runs; ++r) tasks.push_back({m, r});

    std::vector<RunResult> results(tasks.size());
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                results[i] = run_method(sc, methods[tasks[i].method_idx], tasks[i].run,
                                        master_seed);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(tasks.size());
                return;
            }
        }
    };
    if (parallelism == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < parallelism; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    Summary summary;
    summary.scenario = sc.name;
    summary.seed = master_seed;
    for (std::size_t m = 0; m < methods.size(); ++m) {
        MethodSummary ms;
        ms.method = methods[m];
        ms.method_label = methods[m].label(sc.bank);
        ms.runs = num_runs;
        auto metric = [&](auto getter, double& mean, double& se) {
            double acc = 0.0;
            for (int r = 0; r < num_runs; ++r)
                acc += getter(results[m * static_cast<std::size_t>(num_runs) +
                                      static_cast<std::size_t>(r)]);
            mean = acc / num_runs;
            if (num_runs == 1) {
                se = 0.0;
                return;
            }
            double var = 0.0;
            for (int r = 0; r < num_runs; ++r) {
                const double d = getter(results[m * static_cast<std::size_t>(num_runs) +
                                                static_cast<std::size_t>(r)]) -
                                 mean;
                var += d * d;
            }
            se = std::sqrt(var / (num_runs - 1)) / std::sqrt(static_cast<double>(num_runs));
        };
        metric([](const RunResult& r) { return r.rmse; }, ms.rmse_mean, ms.rmse_se);
        metric([](const RunResult& r) { return r.phi_bar; }, ms.phi_bar_mean, ms.phi_bar_se);
        metric([](const RunResult& r) { return r.switch_rate; }, ms.switch_rate_mean,
               ms.switch_rate_se);
        summary.methods.push_back(std::move(ms));
    }
    if (keep_runs) *keep_runs = std::move(results);
    return summary;
}

}  // namespace cfssm
