#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "corrl/config.hpp"
#include "corrl/instances.hpp"
#include "corrl/omle.hpp"
#include "corrl/pmle.hpp"

namespace corrl {

struct HarnessOptions {
    int jobs = 1;
    std::string out_override;
    bool exhaustive_policies = false;
};

/// Everything a config resolves to: the instance, the model class, the
/// behavior policy and a per-run adversary factory (keyed by the run seed).
struct BuiltExperiment {
    ModelClass model_class;
    StochasticPolicy behavior;
    std::vector<int> hard_optimal_actions;
    std::function<std::unique_ptr<Adversary>(uint64_t run_seed)> make_adversary;
    double adversary_budget = 0.0;
};

BuiltExperiment build_experiment(const ExperimentConfig& config);

LearnerParams resolve_params(const AlgorithmSpec& algorithm,
                             const ModelClass& model_class);

/// Per-run CSV bodies. Online schema:
/// t,regret_inc,regret_cum,c_realized_max_stage,conf_set_size,max_sigma
/// with floats at 17 significant digits and \n newlines.
std::string online_run_csv(const RunRecord& record);

struct OfflineRunRow {
    long num_episodes = 0;
    double suboptimality = 0.0;
    double c_realized_max_stage = 0.0;
    int conf_set_size = 0;
    double max_sigma = 1.0;
    double coverage = -1.0;   // <0 prints NA
    double info_coeff = -1.0; // <0 prints NA
};

std::string offline_run_csv(const OfflineRunRow& row);

/// Executes all (seed x algorithm) cells, writes per-run CSVs, the aggregate
/// CSV and summary.json under the output directory. Output files land via
/// temp-then-rename only after the whole batch succeeds.
void run_experiment(const ExperimentConfig& config,
                    const HarnessOptions& options);

/// Eluder / coverage / information-coefficient report next to the closed-form
/// bounds; writes <out>/complexity.json.
void measure_complexity(const ExperimentConfig& config,
                        const HarnessOptions& options);

void write_file_atomic(const std::string& path, const std::string& content);

std::string format_g17(double value);

/// Instance and model-class JSON round-trip (the harness file format).
void save_instance_json(const std::string& path, const EpisodicMdp& model);
EpisodicMdp load_instance_json(const std::string& path);
void save_model_class_json(const std::string& path, const ModelClass& mc);
ModelClass load_model_class_json(const std::string& path);

/// Run fn(i) for i in [0, n) on up to `jobs` threads. Exceptions propagate.
void parallel_for(long n, int jobs, const std::function<void(long)>& fn);

} // namespace corrl
