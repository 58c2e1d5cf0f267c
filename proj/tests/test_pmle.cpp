#include <doctest.h>

#include <cmath>

#include "corrl/instances.hpp"
#include "corrl/pmle.hpp"
#include "oracles.hpp"

using namespace corrl;

TEST_CASE("offline dataset generation") {
    const auto inst = make_offline_hard_instance(4, 3, 0.1, 0.4, 900);

    SUBCASE("null adversary leaves an empty ledger") {
        auto adv = make_null_adversary();
        const auto dataset =
            generate_offline_dataset(inst.mdp, inst.behavior, *adv, 50, 1);
        CHECK(dataset.size() == 50);
        CHECK(dataset.ledger.entries.empty());
        CHECK(ledger_summary(dataset.ledger).max_over_stages == 0.0);
    }

    SUBCASE("fixed seed reproduces the dataset") {
        auto adv1 = make_null_adversary();
        auto adv2 = make_null_adversary();
        const auto a = generate_offline_dataset(inst.mdp, inst.behavior, *adv1, 30, 5);
        const auto b = generate_offline_dataset(inst.mdp, inst.behavior, *adv2, 30, 5);
        for (long t = 0; t < 30; ++t)
            for (int h = 0; h < 3; ++h) {
                CHECK(a.trajectories[t].steps[h].state ==
                      b.trajectories[t].steps[h].state);
                CHECK(a.trajectories[t].steps[h].action ==
                      b.trajectories[t].steps[h].action);
                CHECK(a.trajectories[t].steps[h].next_state ==
                      b.trajectories[t].steps[h].next_state);
            }
    }
}

TEST_CASE("fit_offline") {
    SUBCASE("singleton class returns the greedy policy at unit weights") {
        const auto base = make_random_mdp(3, 2, 3, 910);
        ModelClass solo;
        solo.models = {base};
        solo.true_index = 0;
        solo.ratio_bound = 1.0;
        auto adv = make_null_adversary();
        const auto dataset = generate_offline_dataset(
            base, uniform_behavior(base), *adv, 40, 2);
        const auto fit = fit_offline(dataset, solo,
                                     default_offline_parameters(1, 0.05, 1.0, 0.0));
        CHECK(fit.policy.actions == greedy_policy(base).actions);
        CHECK(fit.confidence_set == std::vector<int>{0});
        for (const auto& per_h : fit.weights.sigma)
            for (double s : per_h) CHECK(s == 1.0);
        CHECK(evaluate_suboptimality(fit.policy, base) ==
              doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("empty dataset rejected") {
        const auto base = make_random_mdp(2, 2, 2, 911);
        ModelClass solo;
        solo.models = {base};
        solo.true_index = 0;
        CHECK_THROWS_AS(fit_offline(OfflineDataset{}, solo,
                                    default_offline_parameters(1, 0.05, 1.0, 0.0)),
                        EmptyDataset);
    }

    SUBCASE("well-covered clean data recovers the optimal policy") {
        const auto inst = make_offline_hard_instance(4, 3, 0.1, 0.75, 912);
        const auto mc = make_structured_class_offline(inst, 64);
        const auto params = default_offline_parameters(mc.size(), 0.05,
                                                       mc.ratio_bound, 0.0);
        int recovered = 0;
        const int n_seeds = 10;
        for (int seed = 1; seed <= n_seeds; ++seed) {
            auto adv = make_null_adversary();
            const auto dataset = generate_offline_dataset(
                inst.mdp, uniform_behavior(inst.mdp), *adv, 3000, seed);
            const auto fit = fit_offline(dataset, mc, params);
            if (evaluate_suboptimality(fit.policy, inst.mdp) < 1e-12) ++recovered;
        }
        CHECK(recovered >= 9);
    }

    SUBCASE("pessimism soundness and max-min dominance hold per run") {
        const auto base = make_random_mdp(3, 2, 2, 913);
        const auto mc = make_model_class_random(base, 5, 1e-3, 914, 0.6);
        auto adv = make_budgeted_random_adversary(2.0, 0.3, 21);
        const auto dataset = generate_offline_dataset(
            base, uniform_behavior(base), *adv, 200, 3);
        const auto params =
            default_offline_parameters(mc.size(), 0.05, mc.ratio_bound, 2.0);
        const auto fit = fit_offline(dataset, mc, params);

        const bool true_in_set =
            std::find(fit.confidence_set.begin(), fit.confidence_set.end(),
                      mc.true_index) != fit.confidence_set.end();
        for (size_t i = 0; i < fit.candidate_values.size(); ++i)
            CHECK(fit.max_min_value >= fit.candidate_values[i] - 1e-12);
        if (true_in_set) {
            // min over the set never exceeds the true-model value
            const auto policies = [&] {
                std::vector<Policy> out;
                for (int m : fit.confidence_set)
                    out.push_back(greedy_policy(mc.models[m]));
                return out;
            }();
            for (size_t i = 0; i < policies.size(); ++i) {
                const double true_value = initial_value(
                    mc.true_model(), value_functions(mc.true_model(), policies[i]));
                CHECK(fit.candidate_values[i] <= true_value + 1e-12);
            }
        }
    }

    SUBCASE("weights satisfy the sandwich after the fit") {
        const auto base = make_random_mdp(3, 2, 2, 915);
        const auto mc = make_model_class_random(base, 4, 1e-3, 916, 0.8);
        auto adv = make_null_adversary();
        const auto dataset = generate_offline_dataset(
            base, uniform_behavior(base), *adv, 60, 4);
        const auto params =
            default_offline_parameters(mc.size(), 0.05, mc.ratio_bound, 3.0);
        const auto fit = fit_offline(dataset, mc, params);
        const auto pairs = dataset.pairs_per_stage();
        for (int h = 0; h < 2; ++h) {
            std::vector<double> sigma_h(dataset.size());
            for (long t = 0; t < dataset.size(); ++t)
                sigma_h[t] = fit.weights.sigma[t][h];
            for (long t = 0; t < dataset.size(); ++t) {
                const double psi = oracles::psi_at(mc, pairs[h], sigma_h, h, t,
                                                   params.alpha, params.lambda);
                CHECK(sigma_h[t] >= std::max(1.0, psi / 2.0) - 1e-12);
                CHECK(sigma_h[t] <= std::max(1.0, psi) + 1e-12);
            }
        }
    }

    SUBCASE("true model stays in the confidence set across seeds") {
        const auto base = make_random_mdp(3, 2, 2, 917);
        const auto mc = make_model_class_random(base, 5, 1e-3, 918, 0.7);
        const double budget = 3.0;
        const auto params =
            default_offline_parameters(mc.size(), 0.1, mc.ratio_bound, budget);
        int covered = 0;
        const int n_seeds = 40;
        for (int seed = 1; seed <= n_seeds; ++seed) {
            auto adv = make_budgeted_random_adversary(budget, 0.4, seed);
            const auto dataset = generate_offline_dataset(
                base, uniform_behavior(base), *adv, 150, seed);
            const auto fit = fit_offline(dataset, mc, params);
            if (std::find(fit.confidence_set.begin(), fit.confidence_set.end(),
                          mc.true_index) != fit.confidence_set.end())
                ++covered;
        }
        // 1 - delta - monte-carlo slack
        CHECK(covered >= static_cast<int>(n_seeds * 0.8));
    }
}

TEST_CASE("exhaustive max-min agrees with the candidate set") {
    SUBCASE("tiny random instance") {
        const auto base = make_random_mdp(2, 2, 2, 920);
        const auto mc = make_model_class_random(base, 3, 1e-3, 921, 0.8);
        auto adv = make_null_adversary();
        const auto dataset = generate_offline_dataset(
            base, uniform_behavior(base), *adv, 120, 6);
        const auto params =
            default_offline_parameters(mc.size(), 0.05, mc.ratio_bound, 0.0);
        const auto greedy_fit = fit_offline(dataset, mc, params);
        FitOptions exhaustive;
        exhaustive.exhaustive_policies = true;
        const auto full_fit = fit_offline(dataset, mc, params, exhaustive);
        CHECK(greedy_fit.max_min_value ==
              doctest::Approx(full_fit.max_min_value).epsilon(1e-12));

        // cross-check the exhaustive mode against a test-side enumeration
        double best = -1e300;
        for (const auto& policy : oracles::all_policies(base)) {
            double worst = 1e300;
            for (int m : full_fit.confidence_set)
                worst = std::min(worst, oracles::trajectory_sum_value(
                                            mc.models[m], policy,
                                            mc.models[m].initial_state));
            best = std::max(best, worst);
        }
        CHECK(full_fit.max_min_value == doctest::Approx(best).epsilon(1e-10));
    }

    SUBCASE("exhaustive mode rejects big policy spaces") {
        const auto inst = make_offline_hard_instance(4, 3, 0.1, 0.4, 922);
        const auto mc = make_structured_class_offline(inst, 8);
        auto adv = make_null_adversary();
        const auto dataset = generate_offline_dataset(
            inst.mdp, inst.behavior, *adv, 10, 7);
        FitOptions exhaustive;
        exhaustive.exhaustive_policies = true;
        CHECK_THROWS(fit_offline(dataset, mc,
                                 default_offline_parameters(mc.size(), 0.05,
                                                            mc.ratio_bound, 0.0),
                                 exhaustive));
    }
}

TEST_CASE("suboptimality evaluation") {
    const auto inst = make_offline_hard_instance(4, 3, 0.1, 0.4, 930);

    SUBCASE("one wrong stage costs reach probability times the gap") {
        Policy wrong = greedy_policy(inst.mdp);
        const int h = 1; // the only decision stage at H=3
        wrong.actions[h][kChainDecision] =
            (inst.optimal_actions[h] + 1) % inst.mdp.num_actions;
        // reach probability of the decision state at stage 1 is 1/H
        const double expected = (1.0 / 3.0) * 2.0 * inst.eta;
        CHECK(evaluate_suboptimality(wrong, inst.mdp) ==
              doctest::Approx(expected).epsilon(1e-12));
    }

    SUBCASE("any policy stays within the value range") {
        Rng rng(931);
        for (int trial = 0; trial < 20; ++trial) {
            Policy random_policy;
            random_policy.actions.assign(3, std::vector<int>(4, 0));
            for (auto& stage : random_policy.actions)
                for (int& a : stage) a = rng.uniform_int(inst.mdp.num_actions);
            const double sub = evaluate_suboptimality(random_policy, inst.mdp);
            CHECK(sub >= -1e-12);
            CHECK(sub <= 1.0 + 1e-12);
        }
    }
}
