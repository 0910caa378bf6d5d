#include "cfssm/cf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cfssm/errors.hpp"

namespace cfssm {

namespace {
constexpr double pos_inf = std::numeric_limits<double>::infinity();
}

void CFConfig::validate() const {
    if (!(delta >= 0.0)) throw InvalidParameterError("cf: hysteresis margin must be >= 0");
    if (window < 1) throw InvalidParameterError("cf: window must be >= 1");
}

ScoreWindow::ScoreWindow(int capacity) {
    if (capacity < 1) throw InvalidParameterError("score window: capacity must be >= 1");
    buf_.assign(static_cast<std::size_t>(capacity), 0.0);
}

void ScoreWindow::push(double value) {
    buf_[static_cast<std::size_t>(head_)] = value;
    head_ = (head_ + 1) % static_cast<int>(buf_.size());
    count_ = std::min(count_ + 1, static_cast<int>(buf_.size()));
}

double ScoreWindow::mean() const {
    if (count_ == 0) throw InvalidInputError("score window: empty");
    // Always normalized by the window length: while the window is still
    // filling, the missing history contributes zero. +inf entries dominate.
    double acc = 0.0;
    const int cap = static_cast<int>(buf_.size());
    for (int k = 0; k < count_; ++k) {
        const int idx = ((head_ - 1 - k) % cap + cap) % cap;
        acc += buf_[static_cast<std::size_t>(idx)];
    }
    return acc / cap;
}

CFState make_cf_state(int bank_size, int initial_structure, const CFConfig& cfg) {
    cfg.validate();
    if (bank_size < 1) throw InvalidInputError("cf: empty bank");
    if (initial_structure < 0 || initial_structure >= bank_size)
        throw InvalidInputError("cf: initial structure outside the bank");
    CFState state;
    state.active = initial_structure;
    state.windows.assign(static_cast<std::size_t>(bank_size), ScoreWindow(cfg.window));
    return state;
}

double phi_score(double log_innovation_likelihood) {
    if (std::isnan(log_innovation_likelihood))
        throw InvalidParameterError("phi_score: NaN log likelihood");
    return -log_innovation_likelihood;
}

double windowed_score(const ScoreWindow& window) { return window.mean(); }

int select_structure(const CFState& state, std::span<const double> windowed,
                     const CFConfig& cfg) {
    if (windowed.size() != state.windows.size())
        throw InvalidInputError("select_structure: score/bank size mismatch");
    int best = 0;
    for (std::size_t s = 1; s < windowed.size(); ++s)
        if (windowed[s] < windowed[best]) best = static_cast<int>(s);  // ties keep lowest id
    if (windowed[static_cast<std::size_t>(best)] == pos_inf)
        throw NoViableStructureError("select_structure: every candidate scored +inf");
    const double incumbent = windowed[static_cast<std::size_t>(state.active)];
    if (incumbent <= windowed[static_cast<std::size_t>(best)] + cfg.delta) return state.active;
    return best;
}

int cf_push_and_select(CFState& state, std::span<const double> raw_scores, const CFConfig& cfg) {
    if (raw_scores.size() != state.windows.size())
        throw InvalidInputError("cf: one raw score per bank structure required");
    std::vector<double> windowed(raw_scores.size());
    for (std::size_t s = 0; s < raw_scores.size(); ++s) {
        state.windows[s].push(raw_scores[s]);
        windowed[s] = state.windows[s].mean();
    }
    const int next = select_structure(state, windowed, cfg);
    if (next != state.active) ++state.switch_count;
    state.active = next;
    ++state.step_count;
    return next;
}

CFStepResult cf_step(Belief& belief, CFState& state, const ModelBank& bank, int t,
                     const Observation& y, const CFConfig& cfg, RngStream& belief_stream,
                     std::span<RngStream> score_streams) {
    if (bank.size() != static_cast<int>(state.windows.size()) ||
        bank.size() != static_cast<int>(score_streams.size()))
        throw InvalidInputError("cf_step: bank/state/stream size mismatch");

    CFStepResult out;
    out.diag.scores.resize(static_cast<std::size_t>(bank.size()));
    for (int s = 0; s < bank.size(); ++s) {
        double loglik;
        try {
            const PredictedParticles pred =
                predict(belief, bank[s], t, score_streams[static_cast<std::size_t>(s)]);
            loglik = innovation_log_likelihood(pred, bank[s], y);
        } catch (const DegenerateLikelihoodError&) {
            loglik = -pos_inf;  // worst score, but other candidates may survive
        }
        out.diag.scores[static_cast<std::size_t>(s)] = phi_score(loglik);
    }

    const int previous = state.active;
    out.diag.selected = cf_push_and_select(state, out.diag.scores, cfg);
    out.diag.switched = out.diag.selected != previous;
    out.diag.windowed_scores.resize(state.windows.size());
    for (std::size_t s = 0; s < state.windows.size(); ++s)
        out.diag.windowed_scores[s] = state.windows[s].mean();
    if (out.diag.switched) {
        double best = pos_inf;
        for (const double w : out.diag.windowed_scores) best = std::min(best, w);
        if (!(out.diag.windowed_scores[static_cast<std::size_t>(previous)] > best + cfg.delta))
            throw std::logic_error("cf_step: switch without exceeding the hysteresis margin");
    }

    const StepOutput step = pf_step(belief, bank[out.diag.selected], t, y, belief_stream);
    belief = step.posterior;
    out.innovation_loglik = step.innovation_loglik;
    out.ess_before_resample = step.ess_before_resample;
    return out;
}

double switch_rate(std::span<const int> structure_sequence) {
    const std::size_t n = structure_sequence.size();
    if (n < 2) throw InvalidInputError("switch_rate: need at least two steps");
    long switches = 0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (structure_sequence[i + 1] != structure_sequence[i]) ++switches;
    return static_cast<double>(switches) / static_cast<double>(n - 1);
}

}  // namespace cfssm
