#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tropnnc/compression.hpp"
#include "tropnnc/dataset.hpp"

namespace tropnnc {

struct ExperimentSpec {
    // model used for a given seed (fixed model or per-seed training)
    std::function<Network(std::uint64_t)> model_for_seed;
    DatasetSplit test;
    std::vector<CompressionMethod> methods;
    std::vector<double> ratios;
    std::vector<std::uint64_t> seeds;
    std::size_t num_iter = 10;
};

struct ExperimentCell {
    std::string method;
    double target = 0.0;
    std::uint64_t seed = 0;
    double accuracy = 0.0;
    std::size_t params = 0;
    std::size_t flops = 0;
    double wall_ms = 0.0;
    bool ok = false;
    std::string error;
};

struct ExperimentSummary {
    std::string method;
    double target = 0.0;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    std::size_t cells = 0;
};

struct ExperimentTable {
    std::vector<ExperimentCell> cells;
    std::vector<ExperimentSummary> summaries;

    std::string to_csv() const;          // method,target,seed,accuracy,params,flops,wall_ms
    std::string summary_csv() const;     // method,target,mean_accuracy,std_accuracy,cells
    double mean_accuracy(const std::string& method, double target) const;
};

// Runs every (method, ratio, seed) cell; per-cell failures are recorded and
// the run continues. Cell count parallelism is capped by TROPNNC_THREADS.
ExperimentTable run_experiment(const ExperimentSpec& spec);

// Writes an accuracy-vs-remaining-percentage SVG line chart, one series per
// method, mirroring the summary table.
void write_accuracy_svg(const ExperimentTable& table, const std::string& path);

} // namespace tropnnc
