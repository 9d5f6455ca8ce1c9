#pragma once

#include <cstdint>
#include <vector>

#include "tropnnc/dataset.hpp"
#include "tropnnc/network.hpp"

namespace tropnnc {

struct TrainOptions {
    std::size_t epochs = 5;
    double learning_rate = 0.1;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
};

// Plain SGD on softmax cross-entropy over a Linear+ReLU MLP with the given
// widths (arch.front() = flattened input dim, arch.back() = class count).
// Deterministic given the seed. epochs = 0 returns the seeded random init.
Network train_mlp(const std::vector<std::size_t>& arch, const DatasetSplit& ds,
                  const TrainOptions& options);

// Fraction of argmax-correct predictions; ties go to the lowest class index.
double eval_accuracy(const Network& net, const DatasetSplit& ds);

} // namespace tropnnc
