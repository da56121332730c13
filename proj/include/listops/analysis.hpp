// Embedding interpretation: cosine-similarity averaging over qualifying runs,
// PCA of number-token structure, residue-class separation scores, ordering
// diagnostics, and attention/FFN norm-ratio comparisons between two models.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "listops/model.hpp"
#include "listops/vocab.hpp"

namespace listops {

struct SimMatrix {
  std::vector<std::string> tokens;
  MatX<double> matrix;  // vocab x vocab, symmetric, unit diagonal
};

// Entry (i, j) = dot(e_i, e_j) / (|e_i| |e_j|). Throws ZeroNormRow naming the
// offending token.
SimMatrix cosine_similarity(const std::vector<std::string>& tokens, const MatX<double>& embedding);

// One run's artifacts as needed for averaging: its token list, embedding and
// final per-task accuracies.
struct RunEmbedding {
  std::vector<std::string> tokens;
  MatX<double> embedding;
  std::map<std::string, double> acc;
};

// Loads embedding.txt and result.txt from a finished run directory.
RunEmbedding load_run_embedding(const std::string& dir);

// Elementwise mean of cosine similarities over runs whose `task` accuracy
// exceeds `threshold`. All runs must share one token list. Throws
// NoQualifyingRuns when the filter empties the list.
SimMatrix average_sims(const std::vector<RunEmbedding>& runs, const std::string& task,
                       double threshold = 0.9);

struct PcaResult {
  MatX<double> coords;      // n x k projections of the number tokens
  VecX<double> variances;   // k eigenvalues, nonincreasing
  MatX<double> components;  // (n_features x k) orthonormal eigenvectors
  int rank = 0;             // numerical rank of the centered matrix
  bool rank_deficient = false;  // k exceeded the rank
};

// PCA of the first `modulus` rows (the number tokens) of the similarity
// matrix: column-center, eigendecompose the covariance, project onto the
// top-k components. Sign convention: each component's largest-magnitude
// coordinate is positive.
PcaResult pca_numbers(const SimMatrix& sim, int modulus, int k);

struct SeparationReport {
  int divisor = 0;
  std::vector<double> per_pc;    // one score per component used (up to 5)
  double averaged = 0;           // mean of per_pc
  MatX<double> centroids;        // divisor x k class centroids
  MatX<double> stds;             // divisor x k within-class standard deviations
};

// Residue classes mod `divisor` over token values 0..modulus-1. Per PC:
// (mean pairwise centroid distance) / (mean within-class std); classes with
// fewer than two members fall back to the std of all coordinates; an exactly
// zero within-std caps the score at the 1e6 sentinel.
SeparationReport separation_score(const MatX<double>& coords, int modulus, int divisor);

// Candidate divisors scanned by reports: every d in [2,6] plus every divisor
// of n in [2, n], deduplicated, ascending.
std::vector<int> candidate_divisors(int modulus);

// Mean averaged separation score of i.i.d. standard-normal coordinates with
// the same shape, over `trials` draws: the Monte-Carlo null for a real score.
double separation_null_mean(int n, int d, int k, int trials, uint64_t seed);

// Spearman rank correlation between token value and PC coordinate, per PC.
std::vector<double> ordering_diagnostic(const MatX<double>& coords);

struct TwoSampleStats {
  double mean_a = 0, mean_b = 0;
  double std_a = 0, std_b = 0;
  double cohen_d = 0;  // (mean_a - mean_b) / pooled std
  double ks = 0;       // sup |F_a - F_b|
};

TwoSampleStats two_sample_stats(const std::vector<double>& a, const std::vector<double>& b);

struct NormRatioComparison {
  TwoSampleStats attn;  // model A vs model B, attention-block ratios
  TwoSampleStats ffwd;  // model A vs model B, feedforward-block ratios
  size_t lines_used = 0;
};

// Pools per-position norm ratios of both models over the same eval lines,
// each tokenized under its own vocabulary. Lines longer than either context
// are skipped; an empty usable set raises EmptyEvalSet.
NormRatioComparison compare_norm_ratios(const Params<float>& params_a, const ModelConfig& cfg_a,
                                        const Vocab& vocab_a, const Params<float>& params_b,
                                        const ModelConfig& cfg_b, const Vocab& vocab_b,
                                        const std::vector<std::string>& lines);

// pca.csv: token,value,PC1..PCk rows for the number tokens.
void write_pca_csv(const std::string& path, const PcaResult& pca, int modulus);
// separation.csv: mix,n,d,score columns per PC, then the average.
void write_separation_csv(const std::string& path, const std::string& mix, int modulus,
                          const std::vector<SeparationReport>& reports);
// normratio.csv: one row per block kind with both models' stats.
void write_normratio_csv(const std::string& path, const NormRatioComparison& cmp);

}  // namespace listops
