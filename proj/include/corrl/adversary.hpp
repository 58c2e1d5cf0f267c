#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "corrl/errors.hpp"

namespace corrl {

/// Exact sup over the support of |corrupted/true - 1|. Entries where the
/// true row is zero are outside the support and contribute nothing.
double corruption_magnitude(const std::vector<double>& true_row,
                            const std::vector<double>& corrupted_row);

/// Per-(episode, stage) corruption magnitudes plus running per-stage sums.
struct CorruptionLedger {
    struct Entry {
        long t;
        int h;
        double c;
    };

    std::vector<Entry> entries;
    std::vector<double> per_stage_totals;

    void record(long t, int h, double c);
};

struct LedgerSummary {
    std::vector<double> per_stage;
    double max_over_stages = 0.0;
};

LedgerSummary ledger_summary(const CorruptionLedger& ledger);

struct CorruptResult {
    std::vector<double> row;
    double c = 0.0;
};

/// Attack strategy. A handle is stateful (per-stage budget bookkeeping) and
/// bound to a single simulation run.
class Adversary {
public:
    virtual ~Adversary() = default;

    /// Observe (t, h, x, a) and emit the transition row the next state is
    /// sampled from, together with the exact corruption magnitude. Budget
    /// state updates internally.
    virtual CorruptResult corrupt(long t, int h, int x, int a,
                                  const std::vector<double>& true_row) = 0;
};

std::unique_ptr<Adversary> make_null_adversary();

/// Budgeted swap-to-flat attack on the 4-state chain instances: whenever the
/// current pair is (x_1, a*_h) and the stage budget still covers the hit,
/// replace the row by the flat suboptimal row. Each hit costs 2.
std::unique_ptr<Adversary> make_online_lower_bound_adversary(
    int d, int horizon, double budget, std::vector<int> optimal_actions);

/// Offline chain attack: every visit to (x_1, a*_h) gets the suboptimal row
/// (1/2-eta to x_2); cost per hit is 4*eta/(1-2*eta). Unbudgeted by default
/// (budget < 0); a nonnegative budget gates hits per stage like the online
/// strategy.
std::unique_ptr<Adversary> make_offline_lower_bound_adversary(
    int d, int horizon, double eta, std::vector<int> optimal_actions,
    double budget = -1.0);

/// Multiplicative in-support noise up to `magnitude`, renormalized; any
/// perturbation that would push a stage past `budget` is skipped entirely.
std::unique_ptr<Adversary> make_budgeted_random_adversary(double budget,
                                                          double magnitude,
                                                          uint64_t seed);

} // namespace corrl
