#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cfssm/cf.hpp"
#include "cfssm/imm.hpp"
#include "cfssm/model.hpp"

namespace cfssm {

struct NoiseConfig {
    double process_var = 10.0;  // sigma_w^2
    double obs_var = 1.0;       // sigma_v^2
    double init_var = 10.0;     // sigma_0^2
};

/// Full experiment description: true process, candidate bank, horizon,
/// filter hyperparameters, and Monte-Carlo size.
struct Scenario {
    std::string name;
    int dim = 1;
    int horizon = 2;        // T
    int num_runs = 1;       // M
    int num_particles = 1;  // N per filter
    int initial_structure = 0;
    std::optional<int> change_time;  // tau: observation truth switches at t >= tau
    NoiseConfig noise;
    CFConfig cf;
    std::optional<IMMConfig> imm;
    ModelBank bank;
    TransitionModel true_transition;
    ObservationModel true_observation;       // truth before tau (or throughout)
    ObservationModel true_observation_post;  // truth at and after tau

    void validate() const;
};

struct TrueTrajectory {
    std::vector<StateVec> states;            // z_1..z_T
    std::vector<Observation> observations;   // y_1..y_T
};

/// z' = z/2 + 25 z / (1 + z^2) + 8 cos(1.2 t), before noise.
double growth_mean_1d(double z, int t);

double growth_transition_1d(double z, int t, double process_var, RngStream& rng);

/// z' = alpha z + noise.
double linear_transition(double z, double alpha, double process_var, RngStream& rng);

double quad_observation_mean(double z);  // z^2 / 20
double sat_observation_mean(double z);   // tanh(z^2 / 20)

/// Coordinate-wise growth map with phase offsets (0, 1 rad) inside the
/// cosine forcing; independent noise per coordinate.
StateVec growth_transition_2d(const StateVec& z, int t, double process_var, RngStream& rng);

/// Named builders for the four benchmark experiments
/// (exp4_1, exp4_2, exp4_3, exp4_4). Throws UnknownScenarioError otherwise.
/// The overload rebuilds the scenario's models around a different noise
/// configuration (the model closures capture the variances, so noise
/// overrides must go through here).
Scenario build_scenario(const std::string& name);
Scenario build_scenario(const std::string& name, const NoiseConfig& noise);
std::vector<std::string> scenario_names();

/// Draw z_0 from the scenario prior and roll the true process forward,
/// consuming only the given stream.
TrueTrajectory simulate_truth(const Scenario& sc, RngStream& data_rng);

/// Initial particle cloud from the scenario prior.
Belief initial_belief(const Scenario& sc, RngStream& init_rng);

}  // namespace cfssm
