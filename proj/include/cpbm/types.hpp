// Core data model: contexts, ranked lists, click records, and the ground-truth
// contextual position bias. A click log is self-contained: every record carries
// the context vector and the feature vectors of the K presented items.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpbm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Parity of the adjacent-pair randomization applied to one impression.
enum class SwapParity { kOdd, kEven };

// Randomization annotation of one impression: which parity was drawn and which
// eligible adjacent pairs (identified by their upper position k, 1-based, the
// pair being (k, k+1)) were actually swapped.
struct SwapAnnotation {
  SwapParity parity;
  std::vector<int> swapped_pairs;
};

// One logged impression: context, the K presented items (feature vectors in
// display order), their clicks, and the optional randomization annotation.
struct ClickRecord {
  std::int64_t query_id = 0;
  Vec context;                       // dimension dq
  std::vector<Vec> items;            // K vectors of dimension dd
  std::vector<int> clicks;           // K entries in {0,1}
  std::optional<SwapAnnotation> swap;
};

// The click log L = {(c, q, D)}. K, dq, dd are fixed across records.
struct ClickLog {
  int K = 0;
  int dq = 0;
  int dd = 0;
  std::uint64_t seed = 0;        // generator seed, recorded for provenance
  std::string config_hash;       // hash of the generating config
  std::vector<ClickRecord> records;
};

// Ground-truth examination weights: P[E=1|q,k] = 1 / k^max(<w,q>+1, 0).
// w produced by sample_bias_weights sums to zero; the device experiment
// constructs its w directly (see augment_device).
struct GroundTruthBias {
  Vec w;
  double eta = 0.0;
};

// Validates the cross-record invariants of a log; throws on violation.
inline void validate(const ClickLog& log) {
  for (const auto& r : log.records) {
    if (r.context.size() != log.dq)
      throw std::invalid_argument("click log record context dimension mismatch");
    if (static_cast<int>(r.items.size()) != log.K ||
        static_cast<int>(r.clicks.size()) != log.K)
      throw std::invalid_argument("click log record length != K");
    for (const auto& d : r.items)
      if (d.size() != log.dd)
        throw std::invalid_argument("click log item dimension mismatch");
    for (int c : r.clicks)
      if (c != 0 && c != 1)
        throw std::invalid_argument("clicks must be 0/1");
  }
}

}  // namespace cpbm
