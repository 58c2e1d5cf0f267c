#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "corrl/errors.hpp"

namespace corrl {

// Experiment configuration. The file format is INI-style sections of
// key = value lines (grammar in docs/config.md); unknown sections or keys
// are hard errors with file:line diagnostics.

struct InstanceSpec {
    std::string generator = "online_hard"; // online_hard|offline_hard|random|file
    int d = 2;
    int horizon = 3;
    int num_states = 2;
    int num_actions = 2;
    double eta = 0.1;
    double epsilon = 0.1;
    uint64_t seed = 0;
    std::string path;
};

struct ModelClassSpec {
    std::string generator = "structured"; // structured|perturbations-of-true|file
    int count = 2;
    int cap = 64;
    double clamp = 1e-3;
    double magnitude = 0.5;
    uint64_t seed = 0;
    std::string path;
};

struct AlgorithmSpec {
    std::vector<std::string> names = {"cr_omle"}; // cr_omle|omle_unweighted|cr_pmle
    double delta = 0.05;
    bool known_c = true;
    double c = 0.0; // C when known_c, the tolerance threshold otherwise
    std::optional<double> alpha;
    std::optional<double> lambda;
    std::optional<double> beta;
    bool exhaustive_policies = false;
};

struct AdversarySpec {
    std::string strategy = "null"; // null|online_lower_bound|offline_lower_bound|budgeted_random
    double budget = 0.0;
    double magnitude = 0.2;
    double eta = 0.1;
    uint64_t seed = 0;
};

struct RunSpec {
    long num_episodes = 1;
    std::vector<uint64_t> seeds = {1};
    std::string out = "results";
    std::string behavior = "uniform"; // uniform|hard_instance (offline only)
    bool measure_coverage = false;
    bool measure_ic = false;
};

struct MeasureSpec {
    std::vector<double> eps = {0.05, 0.1, 0.2};
    long dataset_episodes = 200;
    uint64_t seed = 1;
};

struct ExperimentConfig {
    InstanceSpec instance;
    ModelClassSpec model_class;
    AlgorithmSpec algorithm;
    AdversarySpec adversary;
    RunSpec run;
    MeasureSpec measure;
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& diag_name);

/// Re-serialize a config in canonical form (used for the summary echo).
std::string config_to_text(const ExperimentConfig& config);

} // namespace corrl
