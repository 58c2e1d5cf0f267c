#pragma once

#include <utility>
#include <vector>

#include "corrl/divergence.hpp"
#include "corrl/mdp.hpp"
#include "corrl/weights.hpp"

namespace corrl {

using StatePair = std::pair<int, int>; // (x, a)

/// min{1, sup_{M in set} tv(M, ref at z) / sqrt(lambda + sum_s tv(M, ref at
/// z_s)^2 / sigma_s)} over the stage-h history. Empty history leaves the bare
/// sqrt(lambda) denominator.
double information_ratio(const ModelClass& model_class,
                         const std::vector<int>& model_set, int reference,
                         const HistoryBuffer& history, int h, int x, int a,
                         double lambda);

/// max(1, U/alpha); U == 0 maps to 1 for any alpha (including 0 and +inf).
double online_weight(double uncertainty, double alpha);

struct WeightIterationResult {
    std::vector<double> sigma;
    int iterations = 0;
    /// Per-iteration weight vectors, recorded only on request.
    std::vector<std::vector<double>> trace;
};

struct WeightIterationOptions {
    /// <0 means the default cap 10*log2(T/lambda) + 20.
    int max_iterations = -1;
    bool record_trace = false;
};

/// Fixed-point iteration sigma_t <- max(1, sup over ordered model pairs of
/// (tv_t/alpha) / sqrt(lambda + sum_s tv_s^2/sigma_s)), from all-ones, until
/// no weight more than doubles between sweeps. Throws NonConvergence past
/// the cap (monotone convergence is guaranteed, so that signals a bug).
WeightIterationResult weight_iteration(const ModelClass& model_class,
                                       const std::vector<int>& model_set,
                                       int h, const std::vector<StatePair>& pairs,
                                       double alpha, double lambda,
                                       const WeightIterationOptions& options = {});

/// Greedy estimator: scan candidates in order, keep z when some model pair
/// has a small in-sample sum of tv^2 over the kept prefix while tv at z is
/// large. The independence level sweeps the attainable thresholds >= eps
/// (the definition's "for some eps' >= eps"), so the estimate is
/// nonincreasing in eps. Returns the best kept-prefix length.
int eluder_dimension_greedy(const ModelClass& model_class,
                            const std::vector<StatePair>& candidates, int h,
                            double eps);

/// Exact variant maximizing over all orderings (subset-lattice DP); rejects
/// more than 10 candidates.
int eluder_dimension_exact(const ModelClass& model_class,
                           const std::vector<StatePair>& candidates, int h,
                           double eps);

/// min{1, sqrt(query' (lambda I + sum_s phi_s phi_s')^{-1} query)}.
/// lambda must be positive.
double linear_ir_bound(const std::vector<std::vector<double>>& features,
                       const std::vector<double>& query, double lambda);

/// min over stages and ordered distinct model pairs of the mean in-dataset
/// tv^2 divided by the squared sup tv of the pair; (h, pair) cells with zero
/// sup are skipped. Throws AllPairsIdentical when nothing remains.
double coverage_coefficient(
    const ModelClass& model_class,
    const std::vector<std::vector<StatePair>>& dataset_pairs_per_stage);

/// max over h of the exact expectation, under the optimal policy's occupancy
/// in the true model, of sup over confidence-set pairs of
/// T * tv(z)^2/sigma(z) / (lambda + sum_t tv_t^2/sigma_t).
double information_coefficient(
    const ModelClass& model_class, const std::vector<int>& confidence_set,
    const WeightTable& weights,
    const std::vector<std::vector<StatePair>>& dataset_pairs_per_stage,
    const EpisodicMdp& true_model, const Policy& optimal_policy, double lambda,
    double alpha);

} // namespace corrl
