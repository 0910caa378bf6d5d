#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cfssm/rng.hpp"
#include "cfssm/state.hpp"

namespace cfssm {

/// One observation vector y_t (one entry per observed coordinate).
using Observation = std::vector<double>;

struct GaussianParams {
    double mean = 0.0;
    double variance = 1.0;
};

/// Conditional z_{t+1} | z_t sampler. Deterministic given (z, t, stream state).
struct TransitionModel {
    std::function<StateVec(const StateVec& z, int t, RngStream& rng)> sample;
};

struct ObservationModel {
    std::function<double(const Observation& y, const StateVec& z)> log_density;
    std::function<Observation(const StateVec& z, RngStream& rng)> sample;
};

/// A latent structure: one transition hypothesis paired with one
/// observation hypothesis. The id is its index in the owning bank.
struct Structure {
    int id = 0;
    std::string label;
    TransitionModel transition;
    ObservationModel observation;
};

/// Finite ordered candidate set; ids run 0..size-1 in bank order.
struct ModelBank {
    std::vector<Structure> structures;

    int size() const { return static_cast<int>(structures.size()); }
    const Structure& operator[](int id) const { return structures[static_cast<std::size_t>(id)]; }
};

/// Throws InvalidInputError unless the bank is non-empty with consecutive
/// ids from 0 and usable model callables.
void validate_bank(const ModelBank& bank);

}  // namespace cfssm
