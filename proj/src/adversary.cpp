#include "corrl/adversary.hpp"

#include <algorithm>
#include <cmath>

#include "corrl/rng.hpp"

namespace corrl {

double corruption_magnitude(const std::vector<double>& true_row,
                            const std::vector<double>& corrupted_row) {
    double sup = 0.0;
    for (size_t y = 0; y < true_row.size(); ++y) {
        if (true_row[y] <= 0.0) continue;
        sup = std::max(sup, std::abs(corrupted_row[y] / true_row[y] - 1.0));
    }
    return sup;
}

void CorruptionLedger::record(long t, int h, double c) {
    if (static_cast<int>(per_stage_totals.size()) <= h)
        per_stage_totals.resize(h + 1, 0.0);
    if (c <= 0.0) return;
    entries.push_back({t, h, c});
    per_stage_totals[h] += c;
}

LedgerSummary ledger_summary(const CorruptionLedger& ledger) {
    LedgerSummary summary;
    summary.per_stage = ledger.per_stage_totals;
    for (double v : summary.per_stage)
        summary.max_over_stages = std::max(summary.max_over_stages, v);
    return summary;
}

namespace {

class NullAdversary final : public Adversary {
public:
    CorruptResult corrupt(long, int, int, int,
                          const std::vector<double>& true_row) override {
        return {true_row, 0.0};
    }
};

// Swap-to-flat attack on the chain: each hit replaces the optimal row by the
// suboptimal one and costs exactly (p_opt/p_sub - 1) of stage budget.
class ChainSwapAdversary final : public Adversary {
public:
    ChainSwapAdversary(int horizon, double budget, std::vector<int> optimal_actions,
                       double p_goal_opt, double p_goal_sub)
        : budget_(budget),
          optimal_actions_(std::move(optimal_actions)),
          spent_(horizon, 0.0) {
        flat_row_.assign(4, 0.0);
        flat_row_[2] = p_goal_sub;
        flat_row_[3] = 1.0 - p_goal_sub;
        hit_cost_ = std::max(std::abs(p_goal_sub / p_goal_opt - 1.0),
                             std::abs((1.0 - p_goal_sub) / (1.0 - p_goal_opt) - 1.0));
    }

    CorruptResult corrupt(long, int h, int x, int a,
                          const std::vector<double>& true_row) override {
        if (x != 1 || a != optimal_actions_[h]) return {true_row, 0.0};
        if (budget_ >= 0.0 && spent_[h] + hit_cost_ > budget_) return {true_row, 0.0};
        spent_[h] += hit_cost_;
        return {flat_row_, hit_cost_};
    }

private:
    double budget_;
    std::vector<int> optimal_actions_;
    std::vector<double> spent_;
    std::vector<double> flat_row_;
    double hit_cost_ = 0.0;
};

class BudgetedRandomAdversary final : public Adversary {
public:
    BudgetedRandomAdversary(double budget, double magnitude, uint64_t seed)
        : budget_(budget), magnitude_(magnitude), rng_(seed) {}

    CorruptResult corrupt(long, int h, int, int,
                          const std::vector<double>& true_row) override {
        if (static_cast<int>(spent_.size()) <= h) spent_.resize(h + 1, 0.0);
        std::vector<double> row = true_row;
        double sum = 0.0;
        for (double& p : row) {
            if (p <= 0.0) continue;
            p *= 1.0 + magnitude_ * (2.0 * rng_.uniform01() - 1.0);
            sum += p;
        }
        for (double& p : row) p /= sum;
        const double c = corruption_magnitude(true_row, row);
        if (spent_[h] + c > budget_) return {true_row, 0.0};
        spent_[h] += c;
        return {std::move(row), c};
    }

private:
    double budget_;
    double magnitude_;
    Rng rng_;
    std::vector<double> spent_;
};

} // namespace

std::unique_ptr<Adversary> make_null_adversary() {
    return std::make_unique<NullAdversary>();
}

std::unique_ptr<Adversary> make_online_lower_bound_adversary(
    int d, int horizon, double budget, std::vector<int> optimal_actions) {
    if (d < 2 || horizon < 3)
        throw DimensionMismatch("online lower-bound adversary needs d>=2, H>=3");
    return std::make_unique<ChainSwapAdversary>(horizon, budget,
                                                std::move(optimal_actions), 0.75,
                                                0.25);
}

std::unique_ptr<Adversary> make_offline_lower_bound_adversary(
    int d, int horizon, double eta, std::vector<int> optimal_actions,
    double budget) {
    if (d < 2 || horizon < 3)
        throw DimensionMismatch("offline lower-bound adversary needs d>=2, H>=3");
    if (!(eta > 0.0 && eta < 0.5))
        throw DimensionMismatch("offline lower-bound adversary needs eta in (0,1/2)");
    return std::make_unique<ChainSwapAdversary>(horizon, budget,
                                                std::move(optimal_actions),
                                                0.5 + eta, 0.5 - eta);
}

std::unique_ptr<Adversary> make_budgeted_random_adversary(double budget,
                                                          double magnitude,
                                                          uint64_t seed) {
    return std::make_unique<BudgetedRandomAdversary>(budget, magnitude, seed);
}

} // namespace corrl
