#pragma once

#include <span>
#include <vector>

#include "cfssm/pf.hpp"

namespace cfssm {

/// Selection hyperparameters. Ties in the argmin are always broken toward
/// the lowest structure id; window = 1 recovers the raw per-step rule.
struct CFConfig {
    double delta = 1.0;  // hysteresis margin, >= 0
    int window = 10;     // scores averaged over the last `window` steps, >= 1

    void validate() const;
};

/// Ring buffer holding the most recent `capacity` scores of one structure.
/// The windowed average always normalizes by the window length; while the
/// window is still filling, the missing history contributes zero, so early
/// score differences are damped by a factor count/capacity.
class ScoreWindow {
public:
    explicit ScoreWindow(int capacity = 1);

    void push(double value);
    double mean() const;  // sum of held entries divided by the capacity
    bool empty() const { return count_ == 0; }
    int count() const { return count_; }

private:
    std::vector<double> buf_;
    int head_ = 0;
    int count_ = 0;
};

/// Coupled-recursion state: active structure, per-structure score windows,
/// and switch bookkeeping.
struct CFState {
    int active = 0;
    std::vector<ScoreWindow> windows;
    long switch_count = 0;
    long step_count = 0;
};

CFState make_cf_state(int bank_size, int initial_structure, const CFConfig& cfg);

/// Structural inconsistency score: Phi = -log likelihood. A -inf input
/// (zero likelihood) maps to +inf, the worst possible score.
double phi_score(double log_innovation_likelihood);

/// Windowed average of a structure's score history.
double windowed_score(const ScoreWindow& window);

/// Hysteresis rule on windowed scores: keep the active structure while its
/// score is within delta of the minimum, otherwise move to the argmin
/// (lowest id on exact ties). Throws NoViableStructureError when every
/// candidate scores +inf.
int select_structure(const CFState& state, std::span<const double> windowed,
                     const CFConfig& cfg);

/// Push one raw score per structure, select under hysteresis, and update
/// the state's active structure and counters. This is the full selection
/// layer of the coupled step; scripted-score tests drive it directly.
int cf_push_and_select(CFState& state, std::span<const double> raw_scores, const CFConfig& cfg);

struct CFStepDiagnostics {
    std::vector<double> scores;           // raw Phi_t(s) per structure
    std::vector<double> windowed_scores;  // windowed average per structure
    int selected = 0;
    bool switched = false;
};

struct CFStepResult {
    CFStepDiagnostics diag;
    double innovation_loglik = 0.0;    // committed filter step, belief stream
    double ess_before_resample = 0.0;
};

/// One coupled belief-structure update:
///   1. score every candidate on (belief, y) with its own score stream,
///   2. select the next structure from the windowed scores,
///   3. run the bootstrap step under the selected structure on the belief
///      stream with the same measurement.
/// `belief` and `state` are updated in place. Candidate scoring draws only
/// from `score_streams`, so a run that never switches consumes the belief
/// stream exactly like the fixed-structure filter.
CFStepResult cf_step(Belief& belief, CFState& state, const ModelBank& bank, int t,
                     const Observation& y, const CFConfig& cfg, RngStream& belief_stream,
                     std::span<RngStream> score_streams);

/// Fraction of consecutive steps whose active structure changed:
/// sum 1{s_{t+1} != s_t} / (T - 1). Throws InvalidInputError for T < 2.
double switch_rate(std::span<const int> structure_sequence);

}  // namespace cfssm
