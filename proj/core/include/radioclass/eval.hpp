#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace radioclass {

// Takeoff (label 1) is the positive class throughout.
struct Confusion {
  long long tp = 0, fp = 0, tn = 0, fn = 0;
  long long total() const { return tp + fp + tn + fn; }
};

Confusion confusion(const std::vector<int>& y_true,
                    const std::vector<int>& y_pred);

// Zero-denominator cases (precision, recall, f1, mcc) evaluate to 0.
struct BasicMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double mcc = 0.0;
};

BasicMetrics basic_metrics(const Confusion& c);

/// Probability a random positive outranks a random negative (ties 0.5),
/// computed from midranks. Throws SingleClassTruth.
double auroc(const std::vector<int>& y_true,
             const std::vector<double>& scores);

/// Area under the precision-recall curve, step interpolation, tied scores
/// grouped into one threshold. Throws NoPositives.
double aupr(const std::vector<int>& y_true, const std::vector<double>& scores);

struct SplitIndices {
  std::vector<int> train;
  std::vector<int> test;
};

/// Stratified split: each class shuffled on its own (seed, class) stream
/// and cut at round(train_frac * class size), clamped so both partitions
/// keep at least one example per class. Throws InsufficientClassExamples
/// when a class has fewer than two members.
SplitIndices train_test_split(const std::vector<int>& labels,
                              double train_frac, uint64_t seed);

struct MetricsReport {
  std::string model;
  std::string pipeline;
  bool augmented = false;
  uint64_t seed = 0;
  BasicMetrics basic;
  double auroc_value = 0.0;
  double aupr_value = 0.0;
  Confusion conf;
};

// CSV schema consumed by the report subcommand; reals fixed at 6 decimals
// so identical runs emit identical bytes.
std::string report_csv_header();
std::string report_csv_row(const MetricsReport& r);
void write_reports_csv(const std::filesystem::path& path,
                       const std::vector<MetricsReport>& reports);
std::vector<MetricsReport> read_reports_csv(
    const std::filesystem::path& path);

}  // namespace radioclass
