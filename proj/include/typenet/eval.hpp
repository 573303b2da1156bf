#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "typenet/dataset.hpp"
#include "typenet/neural.hpp"
#include "typenet/vectorize.hpp"

namespace typenet::eval {

struct EvalCounts {
  uint64_t p = 0;        // total predictions
  uint64_t p_valid = 0;  // top-1 class is not "other"
  std::array<uint64_t, 3> p_valid_correct{0, 0, 0};  // k = 1, 2, 3
};

struct Metrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

struct EvalReport {
  EvalCounts counts;
  std::array<Metrics, 3> at_k;  // k = 1, 2, 3
  bool zero_valid = false;      // precision undefined, reported as 0
  std::string arch;
  int variant = 0;
  uint64_t seed = 0;
};

// A prediction is valid iff its top-1 class is not "other"; a valid
// prediction is correct at k iff the true label is an in-vocabulary class
// among the top-k.
EvalReport evaluate(const neural::Mat<float>& probs, const std::vector<uint32_t>& labels,
                    size_t other_index);

std::string report_csv(const std::vector<EvalReport>& reports);
std::string report_table(const std::vector<EvalReport>& reports);

// mean over repetitions, metric by metric
EvalReport aggregate(const std::vector<EvalReport>& repetitions);

struct FeatureStat {
  std::string feature;
  int budget = 0;
  double mean = 0;
  double median = 0;
  uint64_t max = 0;
  double coverage = 0;  // fraction of datapoints with length <= budget
  uint64_t count = 0;
};

std::vector<FeatureStat> feature_length_stats(const std::vector<dataset::Datapoint>& points);
std::string feature_stats_table(const std::vector<FeatureStat>& stats);

struct ExperimentInput {
  std::vector<vectorize::Matrix> train_tensors;
  std::vector<uint32_t> train_labels;
  std::vector<vectorize::Matrix> test_tensors;
  std::vector<uint32_t> test_labels;
  size_t other_index = 0;
  uint64_t vocab_hash = 0;
};

// Trains and evaluates `repetitions` times with the given seeds and reports
// the mean metrics.
EvalReport run_experiment(neural::Arch arch, int variant, const ExperimentInput& input,
                          const neural::TrainConfig& base_config,
                          const std::vector<uint64_t>& seeds);

}  // namespace typenet::eval
