#include "corrl/divergence.hpp"

#include <cmath>

namespace corrl {

namespace {

constexpr double kIngestTol = 1e-9;

void check_rows(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size())
        throw DimensionMismatch("divergence: row length mismatch");
    double sp = 0.0, sq = 0.0;
    for (double v : p) sp += v;
    for (double v : q) sq += v;
    if (std::abs(sp - 1.0) > kIngestTol || std::abs(sq - 1.0) > kIngestTol)
        throw NotARow("divergence: input row does not sum to 1");
}

} // namespace

double tv_distance(std::span<const double> p, std::span<const double> q) {
    check_rows(p, q);
    double sum = 0.0;
    for (size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
    return 0.5 * sum;
}

double hellinger_sq(std::span<const double> p, std::span<const double> q) {
    check_rows(p, q);
    double sum = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
        sum += d * d;
    }
    return sum;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
    check_rows(p, q);
    double sum = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0)
            throw SupportMismatch("kl: q vanishes where p is positive");
        sum += p[i] * std::log(p[i] / q[i]);
    }
    return sum;
}

double ratio_bound(const ModelClass& model_class) {
    const EpisodicMdp& star = model_class.true_model();
    const int H = star.horizon;
    const int n_sa = star.num_states * star.num_actions;
    double bound = 1.0;
    for (const auto& model : model_class.models) {
        for (int h = 0; h < H; ++h) {
            for (int sa = 0; sa < n_sa; ++sa) {
                const auto& p_star = star.transitions[h][sa];
                const auto& p_m = model.transitions[h][sa];
                for (int y = 0; y < star.num_states; ++y) {
                    const bool s_star = p_star[y] > 0.0;
                    const bool s_m = p_m[y] > 0.0;
                    if (s_star != s_m)
                        throw SupportMismatch("ratio_bound: supports differ");
                    if (!s_star) continue;
                    bound = std::max(bound, p_star[y] / p_m[y]);
                    bound = std::max(bound, p_m[y] / p_star[y]);
                }
            }
        }
    }
    return bound;
}

namespace {

double sample_term(const EpisodicMdp& model, const SampleRecord& rec,
                   const WeightTable& weights) {
    const double p = model.row(rec.h, rec.x, rec.a)[rec.x_next];
    if (p <= 0.0)
        throw ZeroLikelihood("weighted_log_likelihood: observed transition has "
                             "zero model probability");
    return std::log(p) / weights.sigma[rec.t][rec.h];
}

} // namespace

double weighted_log_likelihood(const EpisodicMdp& model,
                               const std::vector<SampleRecord>& data,
                               const WeightTable& weights) {
    double sum = 0.0;
    for (const auto& rec : data) sum += sample_term(model, rec, weights);
    return sum;
}

std::vector<double> weighted_log_likelihood_per_stage(
    const EpisodicMdp& model, const std::vector<SampleRecord>& data,
    const WeightTable& weights) {
    std::vector<double> sums(model.horizon, 0.0);
    for (const auto& rec : data) sums[rec.h] += sample_term(model, rec, weights);
    return sums;
}

} // namespace corrl
