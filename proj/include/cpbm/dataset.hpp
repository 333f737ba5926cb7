// Experimental datasets: the synthetic benchmark (linear-logit relevance over
// i.i.d. item features), LETOR-format ingestion with synthesized contexts, the
// device-experiment context augmentation, and the adjacent-pair swap
// randomization applied when logging.
#pragma once

#include "cpbm/rng.hpp"
#include "cpbm/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

namespace cpbm {

struct SinbinConfig {
  int n_queries = 10000;
  int n_items = 100;
  int dq = 10;
  int dd = 10;
  int K = 10;
  std::uint64_t seed = 0;
};

// A synthetic dataset: fixed item pool, fixed relevance parameter theta, and a
// context distribution (entries i.i.d. uniform on [0,1]). The candidate set of
// every query is the full item pool. True relevance is drawn per impression:
// R ~ Bernoulli(sigmoid(<theta, [q; d]>)).
struct SinbinDataset {
  SinbinConfig config;
  Mat items;    // n_items x dd, rows are item feature vectors
  Vec theta_q;  // context half of theta (length dq, plus device padding if any)
  Vec theta_d;  // item half of theta (length dd)

  Vec sample_context(Rng& rng) const;
  double relevance_prob(const Vec& q, const Vec& d) const;

  // Extends contexts by two device coordinates that do not affect relevance
  // (theta zero-padded); used by the device experiment.
  SinbinDataset with_device_dims() const;
};

// Deterministic in config.seed: items ~ Normal(0,1), theta ~ Normal with
// standard deviation 1/sqrt(dq+dd), contexts uniform on [0,1]^dq.
SinbinDataset generate_sinbin(const SinbinConfig& config);

// --- LETOR ingestion -------------------------------------------------------

struct LetorQuery {
  std::int64_t query_id = 0;
  std::vector<Vec> features;   // dense, indexed directly by file feature index
  std::vector<int> grades;     // 0..4
  std::vector<int> binary;     // binarize_relevance(grade)
};

// Parses "<grade> qid:<id> <idx>:<val> ..." lines (optional trailing
// "# comment"), grouping items by qid in file order. Missing indices read 0.
std::vector<LetorQuery> parse_letor(std::istream& in);

// 1 iff grade >= 3; throws outside 0..4.
int binarize_relevance(int grade);

// Drops queries whose items are all irrelevant after binarization.
std::vector<LetorQuery> filter_relevant(std::vector<LetorQuery> queries);

// Min-max scales every feature coordinate to [0,1] across the whole corpus.
void minmax_scale(std::vector<LetorQuery>& queries);

// Synthesizes a 10-dimensional context per query: (1) rank each query's items
// by true relevance; (2) fit per-position logistic models on the per-query
// mean item vector predicting the reward at that position; (3) score feature j
// by s_j = max over positions of |w_j|, pick 5 at random among the 30 largest;
// (4) context = those 5 features of the mean relevant-item vector, followed by
// 5 i.i.d. Normal(0, sigma^2) entries.
std::vector<Vec> synthesize_context(const std::vector<LetorQuery>& queries,
                                    double sigma, Rng& rng);

// --- Device experiment ------------------------------------------------------

struct DeviceConfig {
  double device_prob = 0.1;  // in [0, 0.5]; the problem is symmetric
  double eta = 1.5;
  std::uint64_t seed = 0;
};

// Appends a one-hot device indicator (device 1 drawn with probability
// device_prob; device 0 encodes as (1,0)) and returns the device bias:
// w has zeros on the base coordinates and U(-eta,eta) draws on the two device
// coordinates, uncentered so exactly two distinct bias curves exist.
std::pair<std::vector<Vec>, GroundTruthBias> augment_device(
    const std::vector<Vec>& base_contexts, const DeviceConfig& config, Rng& rng);

// --- Swap randomization -----------------------------------------------------

// Draws a parity uniformly; every adjacent pair (k, k+1) whose upper position k
// has that parity is independently swapped with probability 1/2. Returns the
// permuted order and the annotation. `order` holds item indices.
std::pair<std::vector<int>, SwapAnnotation> apply_swap_randomization(
    const std::vector<int>& order, Rng& rng);

}  // namespace cpbm
