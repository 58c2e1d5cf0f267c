#include <doctest.h>

#include <cmath>

#include "corrl/divergence.hpp"
#include "corrl/instances.hpp"
#include "corrl/rng.hpp"
#include "oracles.hpp"

using namespace corrl;

namespace {

std::vector<double> random_row(Rng& rng, int n, double floor = 0.0) {
    std::vector<double> row(n);
    double sum = 0.0;
    for (double& v : row) {
        v = floor - std::log(1.0 - rng.uniform01());
        sum += v;
    }
    for (double& v : row) v /= sum;
    return row;
}

} // namespace

TEST_CASE("tv distance basics") {
    std::vector<double> p{0.75, 0.25}, q{0.25, 0.75};
    CHECK(tv_distance(p, p) == doctest::Approx(0.0));
    CHECK(tv_distance(p, q) == doctest::Approx(0.5));
    CHECK_THROWS_AS(tv_distance(p, std::vector<double>{1.0, 0.0, 0.0}),
                    DimensionMismatch);
    CHECK_THROWS_AS(tv_distance(p, std::vector<double>{0.5, 0.4}), NotARow);
}

TEST_CASE("tv distance equals the subset-sup oracle") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = random_row(rng, 6);
        const auto q = random_row(rng, 6);
        CHECK(tv_distance(p, q) ==
              doctest::Approx(oracles::tv_subset_sup(p, q)).epsilon(1e-12));
    }
}

TEST_CASE("tv distance is a metric on rows") {
    Rng rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = random_row(rng, 5);
        const auto q = random_row(rng, 5);
        const auto r = random_row(rng, 5);
        CHECK(tv_distance(p, q) == doctest::Approx(tv_distance(q, p)).epsilon(1e-12));
        CHECK(tv_distance(p, r) <= tv_distance(p, q) + tv_distance(q, r) + 1e-12);
    }
}

TEST_CASE("tv bounded by half the sup ratio deviation") {
    Rng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = random_row(rng, 4, 0.05);
        const auto q = random_row(rng, 4, 0.05);
        double sup = 0.0;
        for (int i = 0; i < 4; ++i)
            sup = std::max(sup, std::abs(p[i] / q[i] - 1.0));
        CHECK(tv_distance(p, q) <= 0.5 * sup + 1e-12);
    }
}

TEST_CASE("hellinger squared") {
    std::vector<double> p{1.0, 0.0}, q{0.5, 0.5};
    CHECK(hellinger_sq(p, p) == doctest::Approx(0.0));
    // (1 - sqrt(.5))^2 + .5 = 2 - sqrt(2)
    CHECK(hellinger_sq(p, q) == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("hellinger vs tv and kl inequalities") {
    Rng rng(14);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = random_row(rng, 5, 0.02);
        const auto q = random_row(rng, 5, 0.02);
        const double h2 = hellinger_sq(p, q);
        const double kl = kl_divergence(p, q);
        const double tv = tv_distance(p, q);
        double rho = 0.0;
        for (int i = 0; i < 5; ++i) rho = std::max(rho, std::log(p[i] / q[i]));
        CHECK(h2 <= kl + 1e-12);
        CHECK(kl <= (3.0 + rho) * h2 + 1e-12);
        CHECK(h2 <= 2.0 * tv + 1e-12);
    }
}

TEST_CASE("kl support violation") {
    std::vector<double> p{0.5, 0.5}, q{1.0, 0.0};
    CHECK(kl_divergence(p, p) == doctest::Approx(0.0));
    CHECK_THROWS_AS(kl_divergence(p, q), SupportMismatch);
}

TEST_CASE("ratio bound") {
    const auto inst = make_online_hard_instance(2, 3, 5);

    SUBCASE("singleton class") {
        ModelClass mc;
        mc.models = {inst.mdp};
        mc.true_index = 0;
        CHECK(ratio_bound(mc) == doctest::Approx(1.0));
    }

    SUBCASE("two chain models") {
        // rows (3/4,1/4) against (1/4,3/4) give ratio 3
        const auto mc = make_structured_class_online(inst, 16);
        REQUIRE(mc.size() == 2);
        CHECK(ratio_bound(mc) == doctest::Approx(3.0));
    }

    SUBCASE("clamped class obeys the p_min bound") {
        const double p_min = 1e-3;
        const auto base = make_random_mdp(4, 2, 3, 21, p_min);
        const auto mc = make_model_class_random(base, 5, p_min, 22);
        const int S = base.num_states;
        CHECK(ratio_bound(mc) <= (1.0 - (S - 1) * p_min) / p_min + 1e-9);
    }
}

TEST_CASE("weighted log likelihood") {
    const auto base = make_random_mdp(3, 2, 2, 31);
    WeightTable weights;
    weights.sigma = {{1.0, 1.0}};

    SUBCASE("single sample") {
        EpisodicMdp model = base;
        model.transitions[0][model.sa(0, 0)] = {0.5, 0.25, 0.25};
        std::vector<SampleRecord> data{{0, 0, 0, 0, 0}};
        CHECK(weighted_log_likelihood(model, data, weights) ==
              doctest::Approx(std::log(0.5)).epsilon(1e-12));
    }

    SUBCASE("weights scale terms linearly") {
        std::vector<SampleRecord> data{{0, 0, 0, 1, 2}, {0, 1, 1, 0, 1}};
        const double full = weighted_log_likelihood(base, data, weights);
        WeightTable halved;
        halved.sigma = {{2.0, 2.0}};
        CHECK(weighted_log_likelihood(base, data, halved) ==
              doctest::Approx(0.5 * full).epsilon(1e-12));
        const auto per_stage = weighted_log_likelihood_per_stage(base, data, weights);
        CHECK(per_stage[0] + per_stage[1] == doctest::Approx(full).epsilon(1e-12));
    }

    SUBCASE("zero likelihood raises") {
        EpisodicMdp model = base;
        model.transitions[0][model.sa(0, 0)] = {0.0, 0.5, 0.5};
        std::vector<SampleRecord> data{{0, 0, 0, 0, 0}};
        CHECK_THROWS_AS(weighted_log_likelihood(model, data, weights),
                        ZeroLikelihood);
    }
}

TEST_CASE("true model maximizes the population log-likelihood") {
    const auto base = make_random_mdp(3, 2, 2, 41);
    const auto mc = make_model_class_random(base, 4, 1e-3, 42, 0.8);
    auto adversary = make_null_adversary();
    const auto behavior = uniform_behavior(base);

    // Long uncorrupted stream; the true model should win the sample
    // log-likelihood comfortably.
    std::vector<SampleRecord> data;
    std::vector<std::vector<double>> sigma;
    long t = 0;
    for (; t < 4000; ++t) {
        const auto ep = simulate_episode(base, behavior, *adversary, 7, t + 1);
        for (int h = 0; h < base.horizon; ++h)
            data.push_back({t, h, ep.trajectory.steps[h].state,
                            ep.trajectory.steps[h].action,
                            ep.trajectory.steps[h].next_state});
        sigma.push_back({1.0, 1.0});
    }
    WeightTable weights;
    weights.sigma = sigma;
    const double ll_true = weighted_log_likelihood(mc.true_model(), data, weights);
    for (int m = 0; m < mc.size(); ++m) {
        if (m == mc.true_index) continue;
        CHECK(ll_true > weighted_log_likelihood(mc.models[m], data, weights));
    }
}
