#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cfssm {

/// Bad constant passed to a numeric primitive (e.g. non-positive variance).
struct InvalidParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Structurally malformed input (empty sequence, short trace, ...).
struct InvalidInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Every particle/state received zero likelihood: the innovation
/// likelihood estimate collapsed to 0 and no posterior exists.
struct DegenerateLikelihoodError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A sampled state left the representable range. Carries the index of
/// the offending particle.
struct NumericOverflowError : std::runtime_error {
    NumericOverflowError(const std::string& what, std::size_t index)
        : std::runtime_error(what), particle_index(index) {}
    std::size_t particle_index;
};

/// All candidate structures scored +inf; selection is impossible.
struct NoViableStructureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownScenarioError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace cfssm
