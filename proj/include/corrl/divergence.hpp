#pragma once

#include <span>
#include <vector>

#include "corrl/mdp.hpp"
#include "corrl/weights.hpp"

namespace corrl {

/// Half L1 distance between two probability rows.
double tv_distance(std::span<const double> p, std::span<const double> q);

/// Squared Hellinger distance, sum_i (sqrt(p_i) - sqrt(q_i))^2.
double hellinger_sq(std::span<const double> p, std::span<const double> q);

/// KL(p || q) in nats; requires q > 0 wherever p > 0.
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// Exact max over stages, models against the true model, and on-support
/// entries of max(P*/P_M, P_M/P*). Always >= 1.
double ratio_bound(const ModelClass& model_class);

/// sum over samples of log P_M^h(x'|x,a) / sigma_t^h. Throws ZeroLikelihood
/// if any observed transition has zero model probability.
double weighted_log_likelihood(const EpisodicMdp& model,
                               const std::vector<SampleRecord>& data,
                               const WeightTable& weights);

/// The H per-stage partial sums of the same quantity.
std::vector<double> weighted_log_likelihood_per_stage(
    const EpisodicMdp& model, const std::vector<SampleRecord>& data,
    const WeightTable& weights);

} // namespace corrl
