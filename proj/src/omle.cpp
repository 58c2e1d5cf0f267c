#include "corrl/omle.hpp"

#include <cmath>
#include <limits>

namespace corrl {

LearnerParams default_parameters(int model_class_size, double delta, double B,
                                 double c_or_cbar, bool known_c) {
    if (model_class_size < 1)
        throw Error("default_parameters: empty model class");
    if (!(delta > 0.0 && delta < 1.0))
        throw Error("default_parameters: delta must lie in (0,1)");
    if (B < 1.0) throw Error("default_parameters: ratio bound below 1");
    if (c_or_cbar < 0.0) throw Error("default_parameters: negative corruption level");

    const double log_m = std::log(static_cast<double>(model_class_size));
    const double log_sq_b = std::log(B) * std::log(B);
    const double base_beta =
        5.0 * std::sqrt(std::log(model_class_size / delta) * log_sq_b);

    LearnerParams params;
    params.delta = delta;
    params.known_c = known_c;
    params.c_budget = c_or_cbar;
    params.lambda = std::max(log_m, 1e-6);
    if (known_c) {
        if (c_or_cbar == 0.0) {
            // Corruption-free degeneration: all weights 1, no 7*alpha*C term.
            params.alpha = std::numeric_limits<double>::infinity();
            params.beta = base_beta;
        } else {
            params.alpha = std::sqrt(log_m * log_sq_b) / c_or_cbar;
            params.beta = base_beta + 7.0 * params.alpha * c_or_cbar;
        }
    } else {
        params.alpha = c_or_cbar == 0.0 ? std::numeric_limits<double>::infinity()
                                        : std::sqrt(log_m) / c_or_cbar;
        params.beta = base_beta;
    }
    return params;
}

OmleLearner::OmleLearner(const ModelClass& model_class, LearnerParams params)
    : class_(model_class),
      params_(params),
      history_(model_class.true_model().horizon) {
    const int n = class_.size();
    const EpisodicMdp& ref = class_.models[0];
    values_.reserve(n);
    policies_.reserve(n);
    confidence_set_.reserve(n);
    for (int m = 0; m < n; ++m) {
        values_.push_back(value_functions(class_.models[m]));
        policies_.push_back(greedy_policy(class_.models[m], values_[m]));
        confidence_set_.push_back(m);
    }
    loglik_.assign(n, std::vector<double>(ref.horizon, 0.0));
    visit_mass_.assign(ref.horizon,
                       std::vector<double>(ref.num_states * ref.num_actions, 0.0));
}

int OmleLearner::select_optimistic_model(int x1) const {
    int best = confidence_set_[0];
    double best_v = values_[best].v[0][x1];
    for (int m : confidence_set_) {
        const double v = values_[m].v[0][x1];
        if (v > best_v) {
            best_v = v;
            best = m;
        }
    }
    return best;
}

double OmleLearner::uncertainty_at(int h, int x, int a) const {
    return information_ratio(class_, confidence_set_, reference_, history_, h, x,
                             a, params_.lambda);
}

void OmleLearner::update_round(const Trajectory& trajectory) {
    const EpisodicMdp& ref = class_.models[0];
    const int H = ref.horizon;
    if (static_cast<int>(trajectory.steps.size()) != H)
        throw DimensionMismatch("update_round: trajectory length mismatch");

    // Weights for every stage first, against the pre-round set and history.
    last_sigmas_.assign(H, 1.0);
    for (int h = 0; h < H; ++h) {
        const Step& step = trajectory.steps[h];
        if (!params_.unit_weights) {
            const double u = uncertainty_at(h, step.state, step.action);
            last_sigmas_[h] = online_weight(u, params_.alpha);
        }
    }

    for (int h = 0; h < H; ++h) {
        const Step& step = trajectory.steps[h];
        const double inv_sigma = 1.0 / last_sigmas_[h];
        history_.push(h, step.state, step.action, last_sigmas_[h]);
        visit_mass_[h][ref.sa(step.state, step.action)] += inv_sigma;
        for (int m = 0; m < class_.size(); ++m) {
            const double p =
                class_.models[m].row(h, step.state, step.action)[step.next_state];
            if (p <= 0.0)
                throw ZeroLikelihood("update_round: zero model probability");
            loglik_[m][h] += std::log(p) * inv_sigma;
        }
    }

    // Weighted MLE over the current set, then the per-stage relaxed subset.
    int best = confidence_set_[0];
    double best_ll = -std::numeric_limits<double>::infinity();
    for (int m : confidence_set_) {
        double ll = 0.0;
        for (int h = 0; h < H; ++h) ll += loglik_[m][h];
        if (ll > best_ll) {
            best_ll = ll;
            best = m;
        }
    }
    reference_ = best;

    const double relax = params_.beta * params_.beta;
    std::vector<int> survivors;
    survivors.reserve(confidence_set_.size());
    for (int m : confidence_set_) {
        bool keep = true;
        for (int h = 0; h < H; ++h) {
            if (loglik_[m][h] < loglik_[reference_][h] - relax) {
                keep = false;
                break;
            }
        }
        if (keep) survivors.push_back(m);
    }
    if (survivors.empty())
        throw EmptyConfidenceSet("update_round: confidence set emptied");
    confidence_set_.swap(survivors);
    ++round_;
}

bool OmleLearner::true_in_confidence_set() const {
    for (int m : confidence_set_)
        if (m == class_.true_index) return true;
    return false;
}

double OmleLearner::insample_true_max() const {
    const EpisodicMdp& star = class_.true_model();
    const EpisodicMdp& ref = class_.models[reference_];
    double worst = 0.0;
    for (int h = 0; h < star.horizon; ++h) {
        double sum = 0.0;
        for (int sa = 0; sa < star.num_states * star.num_actions; ++sa) {
            const double mass = visit_mass_[h][sa];
            if (mass <= 0.0) continue;
            const auto& p = star.transitions[h][sa];
            const auto& q = ref.transitions[h][sa];
            double tv = 0.0;
            for (size_t y = 0; y < p.size(); ++y) tv += std::abs(p[y] - q[y]);
            tv *= 0.5;
            sum += mass * tv * tv;
        }
        worst = std::max(worst, sum);
    }
    return worst;
}

RunRecord run_online(const ModelClass& model_class, Adversary& adversary,
                     long num_rounds, const LearnerParams& params, uint64_t seed,
                     const RunOptions& options) {
    const EpisodicMdp& true_model = model_class.true_model();
    OmleLearner learner(model_class, params);
    CorruptionLedger ledger;

    RunRecord record;
    record.params = params;
    record.rounds.reserve(num_rounds);

    const ValueTables& v_star = learner.model_values(model_class.true_index);
    // V of each member's greedy policy under the true model, filled on use.
    std::vector<ValueTables> value_under_true(model_class.size());
    std::vector<char> evaluated(model_class.size(), 0);

    double regret_cum = 0.0;
    for (long t = 1; t <= num_rounds; ++t) {
        const int x1 = draw_initial_state(true_model, seed, t);
        const int chosen = learner.select_optimistic_model(x1);
        if (!evaluated[chosen]) {
            value_under_true[chosen] =
                value_functions(true_model, learner.model_policy(chosen));
            evaluated[chosen] = 1;
        }
        EpisodeResult episode =
            simulate_episode(true_model, learner.model_policy(chosen), adversary,
                             seed, t, options.callbacks, x1);
        for (int h = 0; h < true_model.horizon; ++h)
            ledger.record(t, h, episode.corruption[h]);

        const double inc = v_star.v[0][x1] - value_under_true[chosen].v[0][x1];
        regret_cum += inc;

        learner.update_round(episode.trajectory);

        RoundLog row;
        row.t = t;
        row.regret_inc = inc;
        row.regret_cum = regret_cum;
        row.c_realized_max_stage = ledger_summary(ledger).max_over_stages;
        row.conf_set_size = static_cast<int>(learner.confidence_set().size());
        row.max_sigma = 1.0;
        for (double s : learner.last_sigmas())
            row.max_sigma = std::max(row.max_sigma, s);
        row.true_in_confidence_set = learner.true_in_confidence_set();
        row.insample_true_max = learner.insample_true_max();
        record.rounds.push_back(row);

        if (options.keep_trajectories) {
            record.trajectories.push_back(episode.trajectory);
            record.sigmas.push_back(learner.last_sigmas());
        }
    }
    record.realized_c_per_stage = ledger_summary(ledger).per_stage;
    return record;
}

} // namespace corrl
