// Serialization: line-delimited JSON click logs (header line + one record per
// line), model snapshots, fitted-predictor descriptors, delimited metric
// tables, and atomic file writes (write-then-rename) so concurrent sweeps never
// expose partial files.
#pragma once

#include "cpbm/estimators.hpp"
#include "cpbm/lin_ts.hpp"
#include "cpbm/predictors.hpp"
#include "cpbm/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace cpbm {

void write_click_log(std::ostream& out, const ClickLog& log);
ClickLog read_click_log(std::istream& in);
void write_click_log(const std::filesystem::path& path, const ClickLog& log);
ClickLog read_click_log(const std::filesystem::path& path);

// Fitted predictors: a descriptor (estimator kind, normalization) plus either
// the curve(s) or the network snapshot (dims, flattened parameters).
void write_bias_predictor(const std::filesystem::path& path, const BiasPredictor& p,
                          const std::string& estimator_name);
BiasPredictor read_bias_predictor(const std::filesystem::path& path);

void write_relevance_predictor(const std::filesystem::path& path,
                               const RelevancePredictor& p);
RelevancePredictor read_relevance_predictor(const std::filesystem::path& path);

// One row of the evaluation table; device_prob and CI bounds are optional
// depending on the experiment, written as empty cells when absent.
struct MetricRow {
  std::string estimator;
  double eta = 0.0;
  double device_prob = -1.0;  // < 0 means not applicable
  long seed = -1;
  std::string metric;
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool has_ci = false;
};

void write_metric_table(const std::filesystem::path& path,
                        const std::vector<MetricRow>& rows);

// Online-LTR trajectory: (query_index, dcg_at_k, precision_at_k) per line.
void write_trajectory(const std::filesystem::path& path, const std::vector<LtrRow>& rows);

// Shortest round-trip decimal rendering (used by all table writers so reruns
// are byte-identical).
std::string render_double(double x);

// Writes content to path atomically: temp file in the same directory, rename.
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace cpbm
