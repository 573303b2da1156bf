#include "typenet/eval.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace typenet::eval {

EvalReport evaluate(const neural::Mat<float>& probs, const std::vector<uint32_t>& labels,
                    size_t other_index) {
  if (labels.empty()) throw DataError("empty test set");
  if (static_cast<size_t>(probs.rows()) != labels.size())
    throw DataError("probability/label count mismatch");

  EvalReport report;
  const int n_classes = static_cast<int>(probs.cols());
  const int kmax = std::min(3, n_classes);
  std::vector<int> idx(n_classes);
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    ++report.counts.p;
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + kmax, idx.end(), [&](int a, int b) {
      float pa = probs(r, a), pb = probs(r, b);
      if (pa != pb) return pa > pb;
      return a < b;
    });
    if (static_cast<size_t>(idx[0]) == other_index) continue;  // invalid prediction
    ++report.counts.p_valid;
    uint32_t truth = labels[r];
    if (static_cast<size_t>(truth) == other_index) continue;  // can never be correct
    for (int k = 0; k < kmax; ++k) {
      if (static_cast<uint32_t>(idx[k]) == truth) {
        for (int j = k; j < 3; ++j) ++report.counts.p_valid_correct[j];
        break;
      }
    }
  }

  report.zero_valid = report.counts.p_valid == 0;
  for (int k = 0; k < 3; ++k) {
    double correct = static_cast<double>(report.counts.p_valid_correct[k]);
    report.at_k[k].precision =
        report.zero_valid ? 0.0 : correct / static_cast<double>(report.counts.p_valid);
    report.at_k[k].recall = correct / static_cast<double>(report.counts.p);
    double pr = report.at_k[k].precision + report.at_k[k].recall;
    report.at_k[k].f1 = pr == 0 ? 0.0 : 2.0 * report.at_k[k].precision * report.at_k[k].recall / pr;
  }
  return report;
}

EvalReport aggregate(const std::vector<EvalReport>& repetitions) {
  if (repetitions.empty()) throw DataError("nothing to aggregate");
  EvalReport out = repetitions.front();
  for (int k = 0; k < 3; ++k) {
    double p = 0, r = 0, f = 0;
    for (const auto& rep : repetitions) {
      p += rep.at_k[k].precision;
      r += rep.at_k[k].recall;
      f += rep.at_k[k].f1;
    }
    double n = static_cast<double>(repetitions.size());
    out.at_k[k] = {p / n, r / n, f / n};
  }
  return out;
}

std::string report_csv(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  out << "arch,variant,k,precision,recall,f1,p,p_valid,p_valid_correct,seed\n";
  out << std::setprecision(10);
  for (const auto& rep : reports) {
    for (int k = 0; k < 3; ++k) {
      out << rep.arch << ',' << rep.variant << ',' << (k + 1) << ',' << rep.at_k[k].precision
          << ',' << rep.at_k[k].recall << ',' << rep.at_k[k].f1 << ',' << rep.counts.p << ','
          << rep.counts.p_valid << ',' << rep.counts.p_valid_correct[k] << ',' << rep.seed
          << '\n';
    }
  }
  return out.str();
}

std::string report_table(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1);
  out << "model  dataset   top-1 P/R/F1        top-2 P/R/F1        top-3 P/R/F1\n";
  for (const auto& rep : reports) {
    out << std::left << std::setw(7) << rep.arch << std::setw(10) << rep.variant;
    for (int k = 0; k < 3; ++k) {
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(1) << rep.at_k[k].precision * 100 << '/'
           << rep.at_k[k].recall * 100 << '/' << rep.at_k[k].f1 * 100;
      out << std::setw(20) << cell.str();
    }
    if (rep.zero_valid) out << "  (no valid predictions)";
    out << '\n';
  }
  return out.str();
}

namespace {

FeatureStat stat_for(const std::string& name, int budget, const std::vector<uint64_t>& lengths) {
  FeatureStat s;
  s.feature = name;
  s.budget = budget;
  s.count = lengths.size();
  if (lengths.empty()) return s;
  std::vector<uint64_t> sorted = lengths;
  std::sort(sorted.begin(), sorted.end());
  s.max = sorted.back();
  uint64_t total = std::accumulate(sorted.begin(), sorted.end(), uint64_t{0});
  s.mean = static_cast<double>(total) / static_cast<double>(sorted.size());
  size_t mid = sorted.size() / 2;
  s.median = sorted.size() % 2 == 1
                 ? static_cast<double>(sorted[mid])
                 : (static_cast<double>(sorted[mid - 1]) + static_cast<double>(sorted[mid])) / 2.0;
  uint64_t covered = 0;
  for (uint64_t len : lengths)
    if (len <= static_cast<uint64_t>(budget)) ++covered;
  s.coverage = static_cast<double>(covered) / static_cast<double>(lengths.size());
  return s;
}

}  // namespace

std::vector<FeatureStat> feature_length_stats(const std::vector<dataset::Datapoint>& points) {
  vectorize::FeatureBudget budget;
  std::vector<uint64_t> fname, fcomment, rcomment, retexpr, paramnames, pname, pcomment;
  for (const auto& dp : points) {
    if (dp.kind == dataset::Kind::Parameter) {
      pname.push_back(dp.name_tokens.size());
      pcomment.push_back(dp.comment_tokens.size());
    } else {
      fname.push_back(dp.fname_tokens.size());
      fcomment.push_back(dp.fcomment_tokens.size());
      rcomment.push_back(dp.rcomment_tokens.size());
      retexpr.push_back(dp.retexpr_tokens.size());
      paramnames.push_back(dp.paramname_tokens.size());
    }
  }
  std::vector<FeatureStat> stats;
  if (!fname.empty()) {
    stats.push_back(stat_for("function_name", budget.name, fname));
    stats.push_back(stat_for("function_comment", budget.comment, fcomment));
    stats.push_back(stat_for("return_comment", budget.return_comment, rcomment));
    stats.push_back(stat_for("return_exprs", budget.return_exprs, retexpr));
    stats.push_back(stat_for("param_names", budget.param_names, paramnames));
  }
  if (!pname.empty()) {
    stats.push_back(stat_for("param_name", budget.param_name, pname));
    stats.push_back(stat_for("param_comment", budget.param_comment, pcomment));
  }
  return stats;
}

std::string feature_stats_table(const std::vector<FeatureStat>& stats) {
  std::ostringstream out;
  out << std::left << std::setw(22) << "feature" << std::right << std::setw(8) << "mean"
      << std::setw(8) << "median" << std::setw(8) << "max" << std::setw(8) << "budget"
      << std::setw(10) << "covered" << '\n';
  out << std::fixed << std::setprecision(2);
  for (const auto& s : stats) {
    out << std::left << std::setw(22) << s.feature << std::right << std::setw(8) << s.mean
        << std::setw(8) << s.median << std::setw(8) << s.max << std::setw(8) << s.budget
        << std::setw(9) << s.coverage * 100 << "%" << '\n';
  }
  return out.str();
}

EvalReport run_experiment(neural::Arch arch, int variant, const ExperimentInput& input,
                          const neural::TrainConfig& base_config,
                          const std::vector<uint64_t>& seeds) {
  std::vector<EvalReport> reps;
  for (uint64_t seed : seeds) {
    neural::ModelConfig mc;
    mc.arch = arch;
    mc.seq_len = static_cast<int>(input.train_tensors.front().rows());
    mc.input_dim = static_cast<int>(input.train_tensors.front().cols());
    mc.output_dim = static_cast<int>(input.other_index) + 1;
    neural::TrainConfig tc = base_config;
    tc.seed = seed;
    neural::TrainedModel model =
        neural::train(mc, tc, input.train_tensors, input.train_labels, input.vocab_hash);
    neural::Mat<float> probs = neural::predict_probs(model.classifier, input.test_tensors);
    EvalReport rep = evaluate(probs, input.test_labels, input.other_index);
    rep.arch = arch_to_string(arch);
    rep.variant = variant;
    rep.seed = seed;
    reps.push_back(rep);
  }
  return aggregate(reps);
}

}  // namespace typenet::eval
