#pragma once

#include <cstdint>
#include <vector>

#include "corrl/adversary.hpp"
#include "corrl/mdp.hpp"
#include "corrl/uncertainty.hpp"
#include "corrl/weights.hpp"

namespace corrl {

struct LearnerParams {
    double alpha = 0.0;
    double lambda = 0.0;
    double beta = 0.0;
    double delta = 0.05;
    bool known_c = true;
    double c_budget = 0.0; // C when known, the tolerance threshold otherwise
    /// Plain OMLE baseline: every weight forced to 1.
    bool unit_weights = false;
};

/// Theorem-prescribed hyper-parameters. known_c: alpha =
/// sqrt(log|M| log^2 B)/C, lambda = log|M|, beta = 5 sqrt(log(|M|/delta)
/// log^2 B) + 7 alpha C; C = 0 degenerates to all-ones weights (alpha = inf)
/// and drops the 7 alpha C term. Unknown C: alpha = sqrt(log|M|)/C_bar and
/// beta keeps only the first term. lambda is floored at 1e-6 for singleton
/// classes.
LearnerParams default_parameters(int model_class_size, double delta, double B,
                                 double c_or_cbar, bool known_c);

/// One learner round as logged by run_online. Regret columns come from exact
/// DP under the true model; the in-sample fields are the post-update
/// confidence-set diagnostics.
struct RoundLog {
    long t = 0;
    double regret_inc = 0.0;
    double regret_cum = 0.0;
    double c_realized_max_stage = 0.0;
    int conf_set_size = 0;
    double max_sigma = 1.0;
    bool true_in_confidence_set = false;
    /// max over h of sum_s tv(P*, P_{ref})^2 / sigma_s after the update.
    double insample_true_max = 0.0;
};

struct RunRecord {
    std::vector<RoundLog> rounds;
    std::vector<double> realized_c_per_stage;
    LearnerParams params;
    /// Populated when requested (replay oracles).
    std::vector<Trajectory> trajectories;
    std::vector<std::vector<double>> sigmas; // [t][h]
};

struct RunOptions {
    bool keep_trajectories = false;
    SimCallbacks* callbacks = nullptr;
};

/// Incremental online learner: optimistic model selection, per-stage
/// uncertainty weights, weighted MLE and the per-stage relaxed confidence
/// set. Confidence sets are nested across rounds by construction.
class OmleLearner {
public:
    OmleLearner(const ModelClass& model_class, LearnerParams params);

    /// argmax over the current confidence set of V_M^1(x1), ties to the
    /// lowest index.
    int select_optimistic_model(int x1) const;

    /// Consume the round's trajectory: weights from the current set and
    /// reference, then the weighted-MLE reference and the relaxed set.
    void update_round(const Trajectory& trajectory);

    const std::vector<int>& confidence_set() const { return confidence_set_; }
    int reference_model() const { return reference_; }
    const HistoryBuffer& history() const { return history_; }
    const LearnerParams& params() const { return params_; }
    const std::vector<double>& last_sigmas() const { return last_sigmas_; }

    /// Greedy value tables of class member m (cached).
    const ValueTables& model_values(int m) const { return values_[m]; }
    const Policy& model_policy(int m) const { return policies_[m]; }

    bool true_in_confidence_set() const;
    /// max over h of sum_s tv(P*, P_ref)^2/sigma_s for the current reference.
    double insample_true_max() const;

private:
    double uncertainty_at(int h, int x, int a) const;

    const ModelClass& class_;
    LearnerParams params_;
    std::vector<ValueTables> values_;
    std::vector<Policy> policies_;
    std::vector<int> confidence_set_;
    int reference_ = 0;
    HistoryBuffer history_;
    long round_ = 0;
    std::vector<double> last_sigmas_;
    /// Weighted log-likelihood accumulators, [m][h].
    std::vector<std::vector<double>> loglik_;
    /// Weighted visit mass per (h, x*A+a): sum of 1/sigma over history.
    std::vector<std::vector<double>> visit_mass_;
};

/// Full online loop: per-round optimistic play against the adversary, regret
/// increments V_*^1(x1) - V_{pi_t,*}^1(x1) by exact DP, corruption ledger.
/// Deterministic given (model_class, params, seed).
RunRecord run_online(const ModelClass& model_class, Adversary& adversary,
                     long num_rounds, const LearnerParams& params,
                     uint64_t seed, const RunOptions& options = {});

} // namespace corrl
