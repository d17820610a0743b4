#include "radioclass/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "radioclass/errors.hpp"
#include "radioclass/rng.hpp"

namespace radioclass {

Confusion confusion(const std::vector<int>& y_true,
                    const std::vector<int>& y_pred) {
  if (y_true.size() != y_pred.size())
    throw LengthMismatch("truth " + std::to_string(y_true.size()) +
                         " vs predictions " + std::to_string(y_pred.size()));
  Confusion c;
  for (size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == 1)
      (y_pred[i] == 1 ? c.tp : c.fn) += 1;
    else
      (y_pred[i] == 1 ? c.fp : c.tn) += 1;
  }
  return c;
}

BasicMetrics basic_metrics(const Confusion& c) {
  BasicMetrics m;
  const auto total = c.total();
  if (total == 0) return m;
  m.accuracy = static_cast<double>(c.tp + c.tn) / total;
  m.precision = (c.tp + c.fp) > 0
                    ? static_cast<double>(c.tp) / (c.tp + c.fp)
                    : 0.0;
  m.recall = (c.tp + c.fn) > 0
                 ? static_cast<double>(c.tp) / (c.tp + c.fn)
                 : 0.0;
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  const double denom = static_cast<double>(c.tp + c.fp) *
                       static_cast<double>(c.tp + c.fn) *
                       static_cast<double>(c.tn + c.fp) *
                       static_cast<double>(c.tn + c.fn);
  m.mcc = denom > 0.0
              ? (static_cast<double>(c.tp) * c.tn -
                 static_cast<double>(c.fp) * c.fn) /
                    std::sqrt(denom)
              : 0.0;
  return m;
}

double auroc(const std::vector<int>& y_true,
             const std::vector<double>& scores) {
  if (y_true.size() != scores.size())
    throw LengthMismatch("truth vs scores");
  const auto n = y_true.size();
  size_t n_pos = 0;
  for (int y : y_true) n_pos += (y == 1);
  const size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw SingleClassTruth("auroc needs both classes");

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return scores[a] < scores[b];
  });

  // midranks: tied scores share the mean of their 1-based rank range
  double rank_sum_pos = 0.0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = (static_cast<double>(i + 1) + (j + 1)) / 2.0;
    for (size_t r = i; r <= j; ++r)
      if (y_true[order[r]] == 1) rank_sum_pos += midrank;
    i = j + 1;
  }
  const double u = rank_sum_pos -
                   static_cast<double>(n_pos) * (n_pos + 1) / 2.0;
  return u / (static_cast<double>(n_pos) * n_neg);
}

double aupr(const std::vector<int>& y_true,
            const std::vector<double>& scores) {
  if (y_true.size() != scores.size())
    throw LengthMismatch("truth vs scores");
  const auto n = y_true.size();
  size_t n_pos = 0;
  for (int y : y_true) n_pos += (y == 1);
  if (n_pos == 0) throw NoPositives("aupr needs a positive example");

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return scores[a] > scores[b];
  });

  double area = 0.0;
  double prev_recall = 0.0;
  size_t tp = 0, fp = 0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    for (size_t r = i; r <= j; ++r) {
      if (y_true[order[r]] == 1)
        ++tp;
      else
        ++fp;
    }
    const double recall = static_cast<double>(tp) / n_pos;
    const double precision = static_cast<double>(tp) / (tp + fp);
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j + 1;
  }
  return area;
}

SplitIndices train_test_split(const std::vector<int>& labels,
                              double train_frac, uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0))
    throw ConfigError("train fraction must be in (0, 1)");
  std::vector<int> by_class[2];
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1)
      throw DimensionMismatch("labels must be 0 or 1");
    by_class[labels[i]].push_back(static_cast<int>(i));
  }
  for (int c = 0; c < 2; ++c)
    if (by_class[c].size() < 2)
      throw InsufficientClassExamples("class " + std::to_string(c) + " has " +
                                      std::to_string(by_class[c].size()) +
                                      " examples, needs >= 2");

  SplitIndices split;
  for (int c = 0; c < 2; ++c) {
    auto rng = make_rng(seed, "split/class" + std::to_string(c));
    shuffle_inplace(by_class[c], rng);
    const auto n_c = by_class[c].size();
    auto n_train = static_cast<size_t>(
        std::llround(train_frac * static_cast<double>(n_c)));
    n_train = std::clamp<size_t>(n_train, 1, n_c - 1);
    split.train.insert(split.train.end(), by_class[c].begin(),
                       by_class[c].begin() + n_train);
    split.test.insert(split.test.end(), by_class[c].begin() + n_train,
                      by_class[c].end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::string report_csv_header() {
  return "model,pipeline,augmented,acc,prec,rec,f1,mcc,auroc,aupr,tp,fp,tn,"
         "fn,seed";
}

std::string report_csv_row(const MetricsReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%s,%s,%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%lld,%lld,%lld,"
                "%lld,%llu",
                r.model.c_str(), r.pipeline.c_str(),
                r.augmented ? "true" : "false", r.basic.accuracy,
                r.basic.precision, r.basic.recall, r.basic.f1, r.basic.mcc,
                r.auroc_value, r.aupr_value, r.conf.tp, r.conf.fp, r.conf.tn,
                r.conf.fn, static_cast<unsigned long long>(r.seed));
  return buf;
}

void write_reports_csv(const std::filesystem::path& path,
                       const std::vector<MetricsReport>& reports) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for write: " + path.string());
  out << report_csv_header() << '\n';
  for (const auto& r : reports) out << report_csv_row(r) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<MetricsReport> read_reports_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty report: " + path.string());
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
    line.pop_back();
  if (line != report_csv_header())
    throw IoError("unexpected report header: " + line);

  std::vector<MetricsReport> reports;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
      line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 15)
      throw IoError("report row has " + std::to_string(fields.size()) +
                    " fields: " + line);
    MetricsReport r;
    r.model = fields[0];
    r.pipeline = fields[1];
    r.augmented = fields[2] == "true";
    r.basic.accuracy = std::stod(fields[3]);
    r.basic.precision = std::stod(fields[4]);
    r.basic.recall = std::stod(fields[5]);
    r.basic.f1 = std::stod(fields[6]);
    r.basic.mcc = std::stod(fields[7]);
    r.auroc_value = std::stod(fields[8]);
    r.aupr_value = std::stod(fields[9]);
    r.conf.tp = std::stoll(fields[10]);
    r.conf.fp = std::stoll(fields[11]);
    r.conf.tn = std::stoll(fields[12]);
    r.conf.fn = std::stoll(fields[13]);
    r.seed = std::stoull(fields[14]);
    reports.push_back(std::move(r));
  }
  return reports;
}

}  // namespace radioclass
