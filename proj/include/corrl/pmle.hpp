#pragma once

#include <cstdint>
#include <vector>

#include "corrl/adversary.hpp"
#include "corrl/mdp.hpp"
#include "corrl/omle.hpp"
#include "corrl/uncertainty.hpp"

namespace corrl {

struct OfflineDataset {
    std::vector<Trajectory> trajectories;
    CorruptionLedger ledger;
    uint64_t seed = 0;

    long size() const { return static_cast<long>(trajectories.size()); }
    int horizon() const {
        return trajectories.empty() ? 0
                                    : static_cast<int>(trajectories[0].steps.size());
    }

    /// The (x, a) pairs per stage, in trajectory order.
    std::vector<std::vector<StatePair>> pairs_per_stage() const;
    std::vector<SampleRecord> records() const;
};

/// T independent rollouts of the behavior policy with the adversary between
/// agent and sampler; the realized ledger rides along.
OfflineDataset generate_offline_dataset(const EpisodicMdp& true_model,
                                        const StochasticPolicy& behavior,
                                        Adversary& adversary, long num_episodes,
                                        uint64_t seed,
                                        SimCallbacks* callbacks = nullptr);

/// Same formulas as the online default_parameters.
LearnerParams default_offline_parameters(int model_class_size, double delta,
                                         double B, double c_or_cbar,
                                         bool known_c = true);

struct OfflineFit {
    Policy policy;
    std::vector<int> confidence_set;
    WeightTable weights;
    int reference_model = 0;
    double max_min_value = 0.0;
    /// Per-stage sum_t tv(P*, P_ref)^2 / sigma_t (confidence diagnostics).
    std::vector<double> insample_true;
    /// max-min objective of every candidate policy, in candidate order.
    std::vector<double> candidate_values;
};

struct FitOptions {
    /// Enumerate all deterministic Markov policies instead of the greedy
    /// candidates; rejected when A^(S*H) exceeds 4096.
    bool exhaustive_policies = false;
};

/// Weight iteration per stage over the full class, weighted MLE, per-stage
/// relaxed confidence set, then the pessimistic max-min policy over the
/// candidate set {greedy(M) : M in set} + greedy(reference).
OfflineFit fit_offline(const OfflineDataset& dataset,
                       const ModelClass& model_class,
                       const LearnerParams& params,
                       const FitOptions& options = {});

/// V_*^1(x1) - V_{policy,*}^1(x1) by exact DP under the true model.
double evaluate_suboptimality(const Policy& policy,
                              const EpisodicMdp& true_model);

} // namespace corrl
