#pragma once

#include <string>
#include <vector>

namespace cfssm {
namespace verify {

struct PropertyResult {
    std::string name;
    bool passed = false;
    std::string detail;  // counterexample / statistics on failure, summary on success
};

/// Names: normalization, descent, finite-switching, non-intrusiveness,
/// hull-separation, pf-oracle.
std::vector<std::string> property_names();

/// Run one property check by name. Throws InvalidInputError on an unknown
/// name.
PropertyResult run_property(const std::string& name);

/// Run all properties (or the single named one when `only` is non-empty).
std::vector<PropertyResult> run_all(const std::string& only = "");

}  // namespace verify
}  // namespace cfssm
