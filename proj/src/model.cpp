#include "cfssm/model.hpp"

#include "cfssm/errors.hpp"

namespace cfssm {

void validate_bank(const ModelBank& bank) {
    if (bank.structures.empty()) throw InvalidInputError("model bank: empty");
    for (int i = 0; i < bank.size(); ++i) {
        const Structure& s = bank[i];
        if (s.id != i) throw InvalidInputError("model bank: ids must be consecutive from 0");
        if (!s.transition.sample || !s.observation.log_density || !s.observation.sample)
            throw InvalidInputError("model bank: structure '" + s.label + "' has missing callables");
    }
}

}  // namespace cfssm
