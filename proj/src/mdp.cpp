#include "corrl/mdp.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace corrl {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kAdversaryRowTol = 1e-9;

void check(bool ok, const char* what) {
    if (!ok) throw DimensionMismatch(what);
}

} // namespace

void EpisodicMdp::validate() const {
    check(num_states > 0 && num_actions > 0 && horizon > 0,
          "mdp: dimensions must be positive");
    check(static_cast<int>(transitions.size()) == horizon,
          "mdp: transitions horizon mismatch");
    check(static_cast<int>(rewards.size()) == horizon,
          "mdp: rewards horizon mismatch");
    const int n_sa = num_states * num_actions;
    for (int h = 0; h < horizon; ++h) {
        check(static_cast<int>(transitions[h].size()) == n_sa,
              "mdp: transition table shape");
        check(static_cast<int>(rewards[h].size()) == n_sa, "mdp: reward table shape");
        for (int sa = 0; sa < n_sa; ++sa) {
            const auto& row = transitions[h][sa];
            check(static_cast<int>(row.size()) == num_states, "mdp: row length");
            double sum = 0.0;
            for (double p : row) {
                if (p < 0.0 || p > 1.0 + kRowSumTol)
                    throw NotARow("mdp: probability outside [0,1]");
                sum += p;
            }
            if (std::abs(sum - 1.0) > kRowSumTol)
                throw NotARow("mdp: transition row does not sum to 1 at h=" +
                              std::to_string(h));
        }
    }
    if (!initial_dist.empty()) {
        check(static_cast<int>(initial_dist.size()) == num_states,
              "mdp: initial distribution length");
        double sum = 0.0;
        for (double p : initial_dist) {
            if (p < 0.0) throw NotARow("mdp: negative initial probability");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRowSumTol)
            throw NotARow("mdp: initial distribution does not sum to 1");
    }
    check(initial_state >= 0 && initial_state < num_states, "mdp: initial state");

    // Reachable reward sums in [0,1], checked exactly with max/min DP over
    // the support graph.
    std::vector<double> hi(num_states, 0.0), lo(num_states, 0.0);
    for (int h = horizon - 1; h >= 0; --h) {
        std::vector<double> hi_next = hi, lo_next = lo;
        for (int x = 0; x < num_states; ++x) {
            double best = -1e300, worst = 1e300;
            for (int a = 0; a < num_actions; ++a) {
                const auto& row = transitions[h][sa(x, a)];
                double row_hi = -1e300, row_lo = 1e300;
                for (int y = 0; y < num_states; ++y) {
                    if (row[y] <= 0.0) continue;
                    row_hi = std::max(row_hi, hi_next[y]);
                    row_lo = std::min(row_lo, lo_next[y]);
                }
                if (h == horizon - 1) row_hi = row_lo = 0.0;
                best = std::max(best, reward(h, x, a) + row_hi);
                worst = std::min(worst, reward(h, x, a) + row_lo);
            }
            hi[x] = best;
            lo[x] = worst;
        }
    }
    const double slack = 1e-9;
    auto reach_bounds = [&](int x) {
        if (hi[x] > 1.0 + slack || lo[x] < -slack)
            throw NotARow("mdp: reachable reward sums leave [0,1]");
    };
    if (initial_dist.empty()) {
        reach_bounds(initial_state);
    } else {
        for (int x = 0; x < num_states; ++x)
            if (initial_dist[x] > 0.0) reach_bounds(x);
    }
}

void ModelClass::validate() const {
    if (models.empty()) throw EmptyModelSet("model class: no models");
    check(true_index >= 0 && true_index < size(), "model class: true index");
    const EpisodicMdp& ref = models[0];
    for (const auto& m : models) {
        m.validate();
        check(m.num_states == ref.num_states && m.num_actions == ref.num_actions &&
                  m.horizon == ref.horizon,
              "model class: dimension mismatch");
        check(m.initial_state == ref.initial_state && m.initial_dist == ref.initial_dist,
              "model class: initial state mismatch");
        if (m.rewards != ref.rewards)
            throw DimensionMismatch("model class: rewards differ across models");
    }
    const EpisodicMdp& star = true_model();
    for (const auto& m : models) {
        for (int h = 0; h < ref.horizon; ++h) {
            for (int sa = 0; sa < ref.num_states * ref.num_actions; ++sa) {
                for (int y = 0; y < ref.num_states; ++y) {
                    const bool a = star.transitions[h][sa][y] > 0.0;
                    const bool b = m.transitions[h][sa][y] > 0.0;
                    if (a != b)
                        throw SupportMismatch(
                            "model class: row supports differ at h=" +
                            std::to_string(h));
                }
            }
        }
    }
}

ValueTables value_functions(const EpisodicMdp& model) {
    const int S = model.num_states, A = model.num_actions, H = model.horizon;
    ValueTables out;
    out.q.assign(H, std::vector<double>(S * A, 0.0));
    out.v.assign(H + 1, std::vector<double>(S, 0.0));
    for (int h = H - 1; h >= 0; --h) {
        for (int x = 0; x < S; ++x) {
            double best = -1e300;
            for (int a = 0; a < A; ++a) {
                double q = model.reward(h, x, a);
                const auto& row = model.row(h, x, a);
                for (int y = 0; y < S; ++y) q += row[y] * out.v[h + 1][y];
                out.q[h][model.sa(x, a)] = q;
                best = std::max(best, q);
            }
            out.v[h][x] = best;
        }
    }
    return out;
}

ValueTables value_functions(const EpisodicMdp& model, const Policy& policy) {
    const int S = model.num_states, A = model.num_actions, H = model.horizon;
    if (static_cast<int>(policy.actions.size()) != H)
        throw DimensionMismatch("policy horizon mismatch");
    ValueTables out;
    out.q.assign(H, std::vector<double>(S * A, 0.0));
    out.v.assign(H + 1, std::vector<double>(S, 0.0));
    for (int h = H - 1; h >= 0; --h) {
        if (static_cast<int>(policy.actions[h].size()) != S)
            throw DimensionMismatch("policy state count mismatch");
        for (int x = 0; x < S; ++x) {
            for (int a = 0; a < A; ++a) {
                double q = model.reward(h, x, a);
                const auto& row = model.row(h, x, a);
                for (int y = 0; y < S; ++y) q += row[y] * out.v[h + 1][y];
                out.q[h][model.sa(x, a)] = q;
            }
            const int pa = policy.actions[h][x];
            if (pa < 0 || pa >= A)
                throw DimensionMismatch("policy action out of range");
            out.v[h][x] = out.q[h][model.sa(x, pa)];
        }
    }
    return out;
}

Policy greedy_policy(const EpisodicMdp& model, const ValueTables& values) {
    const int S = model.num_states, A = model.num_actions, H = model.horizon;
    Policy policy;
    policy.actions.assign(H, std::vector<int>(S, 0));
    for (int h = 0; h < H; ++h) {
        for (int x = 0; x < S; ++x) {
            int best_a = 0;
            double best_q = values.q[h][model.sa(x, 0)];
            for (int a = 1; a < A; ++a) {
                const double q = values.q[h][model.sa(x, a)];
                if (q > best_q) {
                    best_q = q;
                    best_a = a;
                }
            }
            policy.actions[h][x] = best_a;
        }
    }
    return policy;
}

Policy greedy_policy(const EpisodicMdp& model) {
    return greedy_policy(model, value_functions(model));
}

double bellman_error(const EpisodicMdp& model, const EpisodicMdp& true_model,
                     const ValueTables& model_values, int h, int x, int a) {
    const auto& v_next = model_values.v[h + 1];
    const auto& p_model = model.row(h, x, a);
    const auto& p_true = true_model.row(h, x, a);
    double err = 0.0;
    for (int y = 0; y < model.num_states; ++y)
        err += (p_model[y] - p_true[y]) * v_next[y];
    return err;
}

double bellman_error(const EpisodicMdp& model, const EpisodicMdp& true_model,
                     int h, int x, int a) {
    if (model.num_states != true_model.num_states ||
        model.num_actions != true_model.num_actions ||
        model.horizon != true_model.horizon)
        throw DimensionMismatch("bellman_error: model shapes differ");
    return bellman_error(model, true_model, value_functions(model), h, x, a);
}

namespace {

std::vector<double> initial_state_mass(const EpisodicMdp& model) {
    std::vector<double> mass(model.num_states, 0.0);
    if (model.initial_dist.empty())
        mass[model.initial_state] = 1.0;
    else
        mass = model.initial_dist;
    return mass;
}

} // namespace

std::vector<std::vector<double>> occupancy(const EpisodicMdp& model,
                                           const Policy& policy) {
    const int S = model.num_states, A = model.num_actions, H = model.horizon;
    std::vector<std::vector<double>> mu(H, std::vector<double>(S * A, 0.0));
    std::vector<double> state_mass = initial_state_mass(model);
    for (int h = 0; h < H; ++h) {
        std::vector<double> next(S, 0.0);
        for (int x = 0; x < S; ++x) {
            if (state_mass[x] <= 0.0) continue;
            const int a = policy.actions[h][x];
            mu[h][model.sa(x, a)] = state_mass[x];
            const auto& row = model.row(h, x, a);
            for (int y = 0; y < S; ++y) next[y] += state_mass[x] * row[y];
        }
        state_mass.swap(next);
    }
    return mu;
}

std::vector<std::vector<double>> occupancy(const EpisodicMdp& model,
                                           const StochasticPolicy& policy) {
    const int S = model.num_states, A = model.num_actions, H = model.horizon;
    std::vector<std::vector<double>> mu(H, std::vector<double>(S * A, 0.0));
    std::vector<double> state_mass = initial_state_mass(model);
    for (int h = 0; h < H; ++h) {
        std::vector<double> next(S, 0.0);
        for (int x = 0; x < S; ++x) {
            if (state_mass[x] <= 0.0) continue;
            for (int a = 0; a < A; ++a) {
                const double w = state_mass[x] * policy.probs[h][x][a];
                if (w <= 0.0) continue;
                mu[h][model.sa(x, a)] += w;
                const auto& row = model.row(h, x, a);
                for (int y = 0; y < S; ++y) next[y] += w * row[y];
            }
        }
        state_mass.swap(next);
    }
    return mu;
}

double initial_value(const EpisodicMdp& model, const ValueTables& values) {
    if (model.initial_dist.empty()) return values.v[0][model.initial_state];
    double v = 0.0;
    for (int x = 0; x < model.num_states; ++x)
        v += model.initial_dist[x] * values.v[0][x];
    return v;
}

int draw_initial_state(const EpisodicMdp& model, uint64_t root_seed, long t) {
    if (model.initial_dist.empty()) return model.initial_state;
    Rng rng = Rng::stream(root_seed, static_cast<uint64_t>(t), 0);
    return rng.categorical(model.initial_dist);
}

namespace {

void validate_corrupted_row(const std::vector<double>& true_row,
                            const std::vector<double>& row) {
    if (row.size() != true_row.size())
        throw AdversarySupportViolation("adversary: row length changed");
    double sum = 0.0;
    for (size_t y = 0; y < row.size(); ++y) {
        if (row[y] < 0.0)
            throw NotARow("adversary: negative probability");
        if (true_row[y] <= 0.0 && row[y] > 0.0)
            throw AdversarySupportViolation("adversary: mass outside the support");
        if (true_row[y] > 0.0 && row[y] <= 0.0)
            throw AdversarySupportViolation("adversary: support entry dropped to zero");
        sum += row[y];
    }
    if (std::abs(sum - 1.0) > kAdversaryRowTol)
        throw NotARow("adversary: corrupted row does not sum to 1");
}

template <typename ActionFn>
EpisodeResult simulate_impl(const EpisodicMdp& true_model, ActionFn&& pick_action,
                            Adversary& adversary, uint64_t root_seed, long t,
                            SimCallbacks* callbacks, int forced_initial) {
    const int H = true_model.horizon;
    EpisodeResult result;
    result.trajectory.episode_index = t;
    result.trajectory.steps.reserve(H);
    result.corruption.assign(H, 0.0);

    int x = forced_initial >= 0 ? forced_initial
                                : draw_initial_state(true_model, root_seed, t);
    for (int h = 0; h < H; ++h) {
        Rng rng = Rng::stream(root_seed, static_cast<uint64_t>(t),
                              static_cast<uint64_t>(h) + 1);
        const int a = pick_action(h, x, rng);
        const auto& true_row = true_model.row(h, x, a);
        CorruptResult corrupted = adversary.corrupt(t, h, x, a, true_row);
        validate_corrupted_row(true_row, corrupted.row);
        const double c = corruption_magnitude(true_row, corrupted.row);
        result.corruption[h] = c;
        if (callbacks && callbacks->on_corruption)
            callbacks->on_corruption(t, h, true_row, corrupted.row, c);
        const int x_next = rng.categorical(corrupted.row);
        result.trajectory.steps.push_back(
            {x, a, true_model.reward(h, x, a), x_next});
        x = x_next;
    }
    return result;
}

} // namespace

EpisodeResult simulate_episode(const EpisodicMdp& true_model, const Policy& policy,
                               Adversary& adversary, uint64_t root_seed, long t,
                               SimCallbacks* callbacks, int forced_initial) {
    if (static_cast<int>(policy.actions.size()) != true_model.horizon)
        throw DimensionMismatch("simulate_episode: policy horizon mismatch");
    return simulate_impl(
        true_model,
        [&](int h, int x, Rng&) { return policy.actions[h][x]; }, adversary,
        root_seed, t, callbacks, forced_initial);
}

EpisodeResult simulate_episode(const EpisodicMdp& true_model,
                               const StochasticPolicy& policy, Adversary& adversary,
                               uint64_t root_seed, long t, SimCallbacks* callbacks,
                               int forced_initial) {
    if (static_cast<int>(policy.probs.size()) != true_model.horizon)
        throw DimensionMismatch("simulate_episode: policy horizon mismatch");
    return simulate_impl(
        true_model,
        [&](int h, int x, Rng& rng) { return rng.categorical(policy.probs[h][x]); },
        adversary, root_seed, t, callbacks, forced_initial);
}

} // namespace corrl
