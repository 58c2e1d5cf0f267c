#pragma once

#include <vector>

namespace corrl {

/// Per-(episode, stage) uncertainty weights, all >= 1, with the
/// hyper-parameters they were produced under.
struct WeightTable {
    std::vector<std::vector<double>> sigma; // [t][h]
    double alpha = 0.0;
    double lambda = 0.0;

    long rounds() const { return static_cast<long>(sigma.size()); }
};

/// One observed transition, addressed by episode and stage.
struct SampleRecord {
    long t = 0;
    int h = 0;
    int x = 0;
    int a = 0;
    int x_next = 0;
};

/// Per-stage visit history: the ordered (x, a) pairs with the weights they
/// were assigned when observed.
struct HistoryBuffer {
    struct Entry {
        int x = 0;
        int a = 0;
        double sigma = 1.0;
    };

    std::vector<std::vector<Entry>> stages; // [h][s]

    explicit HistoryBuffer(int horizon = 0) : stages(horizon) {}
    void push(int h, int x, int a, double sigma) {
        stages[h].push_back({x, a, sigma});
    }
};

} // namespace corrl
