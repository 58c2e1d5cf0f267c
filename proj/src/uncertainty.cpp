#include "corrl/uncertainty.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

namespace corrl {

namespace {

double tv_rows(const EpisodicMdp& a, const EpisodicMdp& b, int h, int sa) {
    const auto& p = a.transitions[h][sa];
    const auto& q = b.transitions[h][sa];
    double sum = 0.0;
    for (size_t y = 0; y < p.size(); ++y) sum += std::abs(p[y] - q[y]);
    return 0.5 * sum;
}

std::vector<std::pair<int, int>> distinct_pairs(const std::vector<int>& set) {
    std::vector<std::pair<int, int>> out;
    for (size_t i = 0; i < set.size(); ++i)
        for (size_t j = i + 1; j < set.size(); ++j)
            out.emplace_back(set[i], set[j]);
    return out;
}

} // namespace

double information_ratio(const ModelClass& model_class,
                         const std::vector<int>& model_set, int reference,
                         const HistoryBuffer& history, int h, int x, int a,
                         double lambda) {
    if (model_set.empty()) throw EmptyModelSet("information_ratio: empty model set");
    const EpisodicMdp& ref = model_class.models[reference];
    const int query_sa = ref.sa(x, a);
    const auto& entries = history.stages[h];

    double sup = 0.0;
    std::vector<double> tv_cache;
    for (int m : model_set) {
        const EpisodicMdp& model = model_class.models[m];
        const double num = tv_rows(model, ref, h, query_sa);
        if (num <= 0.0) continue;
        tv_cache.assign(ref.num_states * ref.num_actions, -1.0);
        double den_sq = lambda;
        for (const auto& e : entries) {
            const int sa = ref.sa(e.x, e.a);
            if (tv_cache[sa] < 0.0) tv_cache[sa] = tv_rows(model, ref, h, sa);
            den_sq += tv_cache[sa] * tv_cache[sa] / e.sigma;
        }
        const double ratio = den_sq > 0.0 ? num / std::sqrt(den_sq)
                                          : std::numeric_limits<double>::infinity();
        sup = std::max(sup, ratio);
    }
    return std::min(1.0, sup);
}

double online_weight(double uncertainty, double alpha) {
    if (uncertainty == 0.0) return 1.0;
    return std::max(1.0, uncertainty / alpha);
}

WeightIterationResult weight_iteration(const ModelClass& model_class,
                                       const std::vector<int>& model_set, int h,
                                       const std::vector<StatePair>& pairs,
                                       double alpha, double lambda,
                                       const WeightIterationOptions& options) {
    if (model_set.empty()) throw EmptyModelSet("weight_iteration: empty model set");
    const long T = static_cast<long>(pairs.size());
    WeightIterationResult result;
    result.sigma.assign(T, 1.0);
    if (T == 0) return result;

    // Weights depend on the sample only through its (x, a) cell, so iterate
    // on the distinct cells and expand at the end.
    const EpisodicMdp& ref = model_class.models[model_set[0]];
    std::map<int, int> bucket_of_sa;
    std::vector<int> bucket(T);
    std::vector<double> count;
    std::vector<int> bucket_sa;
    for (long t = 0; t < T; ++t) {
        const int sa = ref.sa(pairs[t].first, pairs[t].second);
        auto [it, inserted] = bucket_of_sa.try_emplace(sa, static_cast<int>(count.size()));
        if (inserted) {
            count.push_back(0.0);
            bucket_sa.push_back(sa);
        }
        bucket[t] = it->second;
        count[it->second] += 1.0;
    }
    const int n_buckets = static_cast<int>(count.size());

    const auto model_pairs = distinct_pairs(model_set);
    std::vector<std::vector<double>> tv(model_pairs.size(),
                                        std::vector<double>(n_buckets, 0.0));
    for (size_t p = 0; p < model_pairs.size(); ++p)
        for (int b = 0; b < n_buckets; ++b)
            tv[p][b] = tv_rows(model_class.models[model_pairs[p].first],
                               model_class.models[model_pairs[p].second], h,
                               bucket_sa[b]);

    int max_iters = options.max_iterations;
    if (max_iters < 0)
        max_iters = static_cast<int>(
                        10.0 * std::log2(std::max(2.0, static_cast<double>(T) / lambda))) +
                    20;

    std::vector<double> sigma(n_buckets, 1.0), next(n_buckets, 1.0);
    auto expand = [&](const std::vector<double>& per_bucket) {
        std::vector<double> per_t(T);
        for (long t = 0; t < T; ++t) per_t[t] = per_bucket[bucket[t]];
        return per_t;
    };

    int iterations = 0;
    while (true) {
        if (iterations >= max_iters)
            throw NonConvergence("weight_iteration: iteration cap exceeded");
        ++iterations;
        // Jacobi sweep: every denominator uses the previous sweep's weights
        // and runs over the whole sample.
        std::vector<double> denom(model_pairs.size(), lambda);
        for (size_t p = 0; p < model_pairs.size(); ++p)
            for (int b = 0; b < n_buckets; ++b)
                denom[p] += count[b] * tv[p][b] * tv[p][b] / sigma[b];
        double max_ratio = 0.0;
        for (int b = 0; b < n_buckets; ++b) {
            double psi = 0.0;
            for (size_t p = 0; p < model_pairs.size(); ++p) {
                if (tv[p][b] <= 0.0) continue;
                psi = std::max(psi, tv[p][b] / alpha / std::sqrt(denom[p]));
            }
            next[b] = std::max(1.0, psi);
            max_ratio = std::max(max_ratio, next[b] / sigma[b]);
        }
        sigma.swap(next);
        if (options.record_trace) result.trace.push_back(expand(sigma));
        if (max_ratio <= 2.0) break;
    }
    result.iterations = iterations;
    result.sigma = expand(sigma);
    return result;
}

namespace {

struct PairTvTable {
    std::vector<std::vector<double>> tv; // [pair][candidate]
    size_t n_pairs = 0;
};

PairTvTable candidate_tvs(const ModelClass& model_class,
                          const std::vector<StatePair>& candidates, int h) {
    std::vector<int> all(model_class.size());
    for (int i = 0; i < model_class.size(); ++i) all[i] = i;
    const auto pairs = distinct_pairs(all);
    PairTvTable table;
    table.n_pairs = pairs.size();
    table.tv.assign(pairs.size(), std::vector<double>(candidates.size(), 0.0));
    const EpisodicMdp& ref = model_class.models[0];
    for (size_t p = 0; p < pairs.size(); ++p)
        for (size_t i = 0; i < candidates.size(); ++i)
            table.tv[p][i] =
                tv_rows(model_class.models[pairs[p].first],
                        model_class.models[pairs[p].second], h,
                        ref.sa(candidates[i].first, candidates[i].second));
    return table;
}

} // namespace

namespace {

// Independence levels where the scans can change: the distinct pairwise TV
// values above eps. A sequence is valid for some level eps' >= eps exactly
// when, at threshold b = its smallest witness TV, every element has
// in-sample sum < b^2 and out-of-sample TV >= b. Sweeping b keeps the
// estimate nonincreasing in eps, matching the "for some eps' >= eps" sup in
// the dimension's definition.
std::vector<double> threshold_grid(const PairTvTable& table, double eps) {
    std::vector<double> grid;
    for (const auto& row : table.tv)
        for (double tv : row)
            if (tv > eps) grid.push_back(tv);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

int greedy_scan(const PairTvTable& table, size_t n, double b) {
    std::vector<double> insample(table.n_pairs, 0.0);
    int kept = 0;
    for (size_t i = 0; i < n; ++i) {
        bool independent = false;
        for (size_t p = 0; p < table.n_pairs; ++p) {
            if (insample[p] < b * b && table.tv[p][i] >= b) {
                independent = true;
                break;
            }
        }
        if (!independent) continue;
        ++kept;
        for (size_t p = 0; p < table.n_pairs; ++p)
            insample[p] += table.tv[p][i] * table.tv[p][i];
    }
    return kept;
}

} // namespace

int eluder_dimension_greedy(const ModelClass& model_class,
                            const std::vector<StatePair>& candidates, int h,
                            double eps) {
    if (model_class.size() < 2 || candidates.empty()) return 0;
    const auto table = candidate_tvs(model_class, candidates, h);
    int best = 0;
    for (double b : threshold_grid(table, eps))
        best = std::max(best, greedy_scan(table, candidates.size(), b));
    return best;
}

int eluder_dimension_exact(const ModelClass& model_class,
                           const std::vector<StatePair>& candidates, int h,
                           double eps) {
    const int n = static_cast<int>(candidates.size());
    if (n > 10)
        throw Error("eluder_dimension_exact: more than 10 candidates");
    if (model_class.size() < 2 || n == 0) return 0;
    const auto table = candidate_tvs(model_class, candidates, h);

    // Per-pair in-sample sums over every candidate subset.
    std::vector<std::vector<double>> mask_sum(
        table.n_pairs, std::vector<double>(1u << n, 0.0));
    for (size_t p = 0; p < table.n_pairs; ++p) {
        for (unsigned mask = 1; mask < (1u << n); ++mask) {
            const int low = std::countr_zero(mask);
            mask_sum[p][mask] = mask_sum[p][mask ^ (1u << low)] +
                                table.tv[p][low] * table.tv[p][low];
        }
    }

    int best = 0;
    for (double b : threshold_grid(table, eps)) {
        auto independent_of = [&](int i, unsigned mask) {
            for (size_t p = 0; p < table.n_pairs; ++p)
                if (table.tv[p][i] >= b && mask_sum[p][mask] < b * b) return true;
            return false;
        };
        // A set is orderable iff some element is independent of the rest;
        // independence only depends on the predecessor SET, so the longest
        // ordering is a largest orderable subset.
        std::vector<char> orderable(1u << n, 0);
        orderable[0] = 1;
        for (unsigned mask = 1; mask < (1u << n); ++mask) {
            for (int i = 0; i < n; ++i) {
                if (!(mask & (1u << i))) continue;
                const unsigned prev = mask ^ (1u << i);
                if (orderable[prev] && independent_of(i, prev)) {
                    orderable[mask] = 1;
                    best = std::max(best, std::popcount(mask));
                    break;
                }
            }
        }
    }
    return best;
}

double linear_ir_bound(const std::vector<std::vector<double>>& features,
                       const std::vector<double>& query, double lambda) {
    if (lambda <= 0.0)
        throw Error("linear_ir_bound: lambda must be positive");
    const int d = static_cast<int>(query.size());
    Eigen::MatrixXd gram = lambda * Eigen::MatrixXd::Identity(d, d);
    for (const auto& f : features) {
        if (static_cast<int>(f.size()) != d)
            throw DimensionMismatch("linear_ir_bound: feature dimension mismatch");
        const Eigen::Map<const Eigen::VectorXd> v(f.data(), d);
        gram.noalias() += v * v.transpose();
    }
    const Eigen::Map<const Eigen::VectorXd> q(query.data(), d);
    const Eigen::VectorXd solved = gram.llt().solve(q);
    return std::min(1.0, std::sqrt(q.dot(solved)));
}

double coverage_coefficient(
    const ModelClass& model_class,
    const std::vector<std::vector<StatePair>>& dataset_pairs_per_stage) {
    const EpisodicMdp& ref = model_class.models[0];
    std::vector<int> all(model_class.size());
    for (int i = 0; i < model_class.size(); ++i) all[i] = i;
    const auto pairs = distinct_pairs(all);

    double best = std::numeric_limits<double>::infinity();
    bool any = false;
    for (int h = 0; h < ref.horizon; ++h) {
        const auto& data = dataset_pairs_per_stage[h];
        if (data.empty())
            throw EmptyDataset("coverage_coefficient: empty dataset at a stage");
        for (const auto& [i, j] : pairs) {
            double rho_sq = 0.0;
            for (int sa = 0; sa < ref.num_states * ref.num_actions; ++sa) {
                const double tv = tv_rows(model_class.models[i],
                                          model_class.models[j], h, sa);
                rho_sq = std::max(rho_sq, tv * tv);
            }
            if (rho_sq <= 0.0) continue;
            double mean = 0.0;
            for (const auto& z : data) {
                const double tv = tv_rows(model_class.models[i],
                                          model_class.models[j], h,
                                          ref.sa(z.first, z.second));
                mean += tv * tv;
            }
            mean /= static_cast<double>(data.size());
            best = std::min(best, mean / rho_sq);
            any = true;
        }
    }
    if (!any)
        throw AllPairsIdentical("coverage_coefficient: every model pair is "
                                "identical at every stage");
    return best;
}

double information_coefficient(
    const ModelClass& model_class, const std::vector<int>& confidence_set,
    const WeightTable& weights,
    const std::vector<std::vector<StatePair>>& dataset_pairs_per_stage,
    const EpisodicMdp& true_model, const Policy& optimal_policy, double lambda,
    double alpha) {
    const auto pairs = distinct_pairs(confidence_set);
    if (pairs.empty()) return 0.0;
    const auto mu = occupancy(true_model, optimal_policy);
    const int n_sa = true_model.num_states * true_model.num_actions;
    const double T = static_cast<double>(dataset_pairs_per_stage.empty()
                                             ? 0
                                             : dataset_pairs_per_stage[0].size());

    double worst = 0.0;
    for (int h = 0; h < true_model.horizon; ++h) {
        const auto& data = dataset_pairs_per_stage[h];
        std::vector<double> denom(pairs.size(), lambda);
        for (size_t p = 0; p < pairs.size(); ++p) {
            for (size_t t = 0; t < data.size(); ++t) {
                const double tv =
                    tv_rows(model_class.models[pairs[p].first],
                            model_class.models[pairs[p].second], h,
                            true_model.sa(data[t].first, data[t].second));
                denom[p] += tv * tv / weights.sigma[t][h];
            }
        }
        double expectation = 0.0;
        for (int sa = 0; sa < n_sa; ++sa) {
            if (mu[h][sa] <= 0.0) continue;
            double sup_sigma = 0.0, sup_val = 0.0;
            for (size_t p = 0; p < pairs.size(); ++p) {
                const double tv = tv_rows(model_class.models[pairs[p].first],
                                          model_class.models[pairs[p].second], h,
                                          sa);
                if (tv <= 0.0) continue;
                sup_sigma = std::max(sup_sigma, tv / alpha / std::sqrt(denom[p]));
                sup_val = std::max(sup_val, tv * tv / denom[p]);
            }
            const double sigma_z = std::max(1.0, sup_sigma);
            expectation += mu[h][sa] * T * sup_val / sigma_z;
        }
        worst = std::max(worst, expectation);
    }
    return worst;
}

} // namespace corrl
