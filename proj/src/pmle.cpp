#include "corrl/pmle.hpp"

#include <cmath>
#include <limits>

#include "corrl/divergence.hpp"

namespace corrl {

std::vector<std::vector<StatePair>> OfflineDataset::pairs_per_stage() const {
    const int H = horizon();
    std::vector<std::vector<StatePair>> out(H);
    for (auto& stage : out) stage.reserve(trajectories.size());
    for (const auto& traj : trajectories)
        for (int h = 0; h < H; ++h)
            out[h].emplace_back(traj.steps[h].state, traj.steps[h].action);
    return out;
}

std::vector<SampleRecord> OfflineDataset::records() const {
    std::vector<SampleRecord> out;
    out.reserve(trajectories.size() * horizon());
    for (long t = 0; t < size(); ++t) {
        const auto& steps = trajectories[t].steps;
        for (int h = 0; h < static_cast<int>(steps.size()); ++h)
            out.push_back({t, h, steps[h].state, steps[h].action,
                           steps[h].next_state});
    }
    return out;
}

OfflineDataset generate_offline_dataset(const EpisodicMdp& true_model,
                                        const StochasticPolicy& behavior,
                                        Adversary& adversary, long num_episodes,
                                        uint64_t seed, SimCallbacks* callbacks) {
    OfflineDataset dataset;
    dataset.seed = seed;
    dataset.trajectories.reserve(num_episodes);
    for (long t = 1; t <= num_episodes; ++t) {
        EpisodeResult episode =
            simulate_episode(true_model, behavior, adversary, seed, t, callbacks);
        for (int h = 0; h < true_model.horizon; ++h)
            dataset.ledger.record(t, h, episode.corruption[h]);
        dataset.trajectories.push_back(std::move(episode.trajectory));
    }
    return dataset;
}

LearnerParams default_offline_parameters(int model_class_size, double delta,
                                         double B, double c_or_cbar,
                                         bool known_c) {
    return default_parameters(model_class_size, delta, B, c_or_cbar, known_c);
}

namespace {

std::vector<Policy> enumerate_policies(const EpisodicMdp& model) {
    const int S = model.num_states, A = model.num_actions, H = model.horizon;
    double count = 1.0;
    for (int i = 0; i < S * H; ++i) {
        count *= A;
        if (count > 4096.0)
            throw Error("fit_offline: exhaustive mode needs A^(S*H) <= 4096");
    }
    const long total = static_cast<long>(count);
    std::vector<Policy> out;
    out.reserve(total);
    for (long k = 0; k < total; ++k) {
        Policy policy;
        policy.actions.assign(H, std::vector<int>(S, 0));
        long rem = k;
        for (int h = 0; h < H; ++h)
            for (int x = 0; x < S; ++x) {
                policy.actions[h][x] = static_cast<int>(rem % A);
                rem /= A;
            }
        out.push_back(std::move(policy));
    }
    return out;
}

double stage_tv(const EpisodicMdp& a, const EpisodicMdp& b, int h, int sa) {
    const auto& p = a.transitions[h][sa];
    const auto& q = b.transitions[h][sa];
    double sum = 0.0;
    for (size_t y = 0; y < p.size(); ++y) sum += std::abs(p[y] - q[y]);
    return 0.5 * sum;
}

} // namespace

OfflineFit fit_offline(const OfflineDataset& dataset,
                       const ModelClass& model_class,
                       const LearnerParams& params, const FitOptions& options) {
    if (dataset.trajectories.empty())
        throw EmptyDataset("fit_offline: empty dataset");
    const EpisodicMdp& ref_shape = model_class.models[0];
    const int H = ref_shape.horizon;
    const long T = dataset.size();
    if (dataset.horizon() != H)
        throw DimensionMismatch("fit_offline: dataset horizon mismatch");

    std::vector<int> all_models(model_class.size());
    for (int m = 0; m < model_class.size(); ++m) all_models[m] = m;

    // Stage-wise weight iteration over the full class.
    const auto pairs = dataset.pairs_per_stage();
    OfflineFit fit;
    fit.weights.alpha = params.alpha;
    fit.weights.lambda = params.lambda;
    fit.weights.sigma.assign(T, std::vector<double>(H, 1.0));
    if (!params.unit_weights) {
        for (int h = 0; h < H; ++h) {
            const auto wi = weight_iteration(model_class, all_models, h, pairs[h],
                                             params.alpha, params.lambda);
            for (long t = 0; t < T; ++t) fit.weights.sigma[t][h] = wi.sigma[t];
        }
    }

    const auto records = dataset.records();
    std::vector<std::vector<double>> loglik(model_class.size());
    for (int m = 0; m < model_class.size(); ++m)
        loglik[m] = weighted_log_likelihood_per_stage(model_class.models[m],
                                                      records, fit.weights);

    int best = 0;
    double best_total = -std::numeric_limits<double>::infinity();
    for (int m = 0; m < model_class.size(); ++m) {
        double total = 0.0;
        for (int h = 0; h < H; ++h) total += loglik[m][h];
        if (total > best_total) {
            best_total = total;
            best = m;
        }
    }
    fit.reference_model = best;

    const double relax = params.beta * params.beta;
    for (int m = 0; m < model_class.size(); ++m) {
        bool keep = true;
        for (int h = 0; h < H; ++h) {
            if (loglik[m][h] < loglik[best][h] - relax) {
                keep = false;
                break;
            }
        }
        if (keep) fit.confidence_set.push_back(m);
    }
    if (fit.confidence_set.empty())
        throw EmptyConfidenceSet("fit_offline: confidence set emptied");

    // Pessimistic max-min over the candidate policies. The reference model's
    // greedy policy is always among them (it survives its own test).
    std::vector<Policy> candidates;
    if (options.exhaustive_policies) {
        candidates = enumerate_policies(ref_shape);
    } else {
        candidates.reserve(fit.confidence_set.size());
        for (int m : fit.confidence_set)
            candidates.push_back(greedy_policy(model_class.models[m]));
    }

    double best_value = -std::numeric_limits<double>::infinity();
    size_t best_idx = 0;
    fit.candidate_values.reserve(candidates.size());
    for (size_t i = 0; i < candidates.size(); ++i) {
        double worst = std::numeric_limits<double>::infinity();
        for (int m : fit.confidence_set) {
            const double v = initial_value(
                model_class.models[m],
                value_functions(model_class.models[m], candidates[i]));
            worst = std::min(worst, v);
        }
        fit.candidate_values.push_back(worst);
        if (worst > best_value) {
            best_value = worst;
            best_idx = i;
        }
    }
    fit.policy = candidates[best_idx];
    fit.max_min_value = best_value;

    const EpisodicMdp& star = model_class.true_model();
    const EpisodicMdp& ref = model_class.models[fit.reference_model];
    fit.insample_true.assign(H, 0.0);
    for (int h = 0; h < H; ++h) {
        for (long t = 0; t < T; ++t) {
            const auto& z = pairs[h][t];
            const double tv = stage_tv(star, ref, h, star.sa(z.first, z.second));
            fit.insample_true[h] += tv * tv / fit.weights.sigma[t][h];
        }
    }
    return fit;
}

double evaluate_suboptimality(const Policy& policy,
                              const EpisodicMdp& true_model) {
    const double v_opt = initial_value(true_model, value_functions(true_model));
    const double v_pi =
        initial_value(true_model, value_functions(true_model, policy));
    return v_opt - v_pi;
}

} // namespace corrl
