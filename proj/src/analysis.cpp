#include "listops/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>

#include "listops/common.hpp"
#include "listops/rng.hpp"
#include "listops/train.hpp"

namespace listops {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

double sample_std(const VecX<double>& xs) {
  const long m = xs.size();
  if (m < 2) return 0;
  const double mu = xs.mean();
  return std::sqrt((xs.array() - mu).square().sum() / double(m - 1));
}

// Average ranks, ties sharing their mean rank.
std::vector<double> ranks_of(const std::vector<double>& xs) {
  const size_t n = xs.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return xs[a] < xs[b]; });
  std::vector<double> rank(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double shared = 0.5 * double(i + j) + 1.0;
    for (size_t t = i; t <= j; ++t) rank[order[t]] = shared;
    i = j + 1;
  }
  return rank;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const size_t n = a.size();
  double ma = 0, mb = 0;
  for (size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= double(n);
  mb /= double(n);
  double num = 0, va = 0, vb = 0;
  for (size_t i = 0; i < n; ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  if (va == 0 || vb == 0) return 0;
  return num / std::sqrt(va * vb);
}

}  // namespace

SimMatrix cosine_similarity(const std::vector<std::string>& tokens,
                            const MatX<double>& embedding) {
  if (long(tokens.size()) != embedding.rows())
    raise("VocabMismatch", std::to_string(tokens.size()) + " tokens for " +
                               std::to_string(embedding.rows()) + " embedding rows");
  MatX<double> unit = embedding;
  for (long i = 0; i < unit.rows(); ++i) {
    const double norm = unit.row(i).norm();
    if (norm == 0) raise("ZeroNormRow", tokens[size_t(i)]);
    unit.row(i) /= norm;
  }
  SimMatrix sim;
  sim.tokens = tokens;
  sim.matrix = unit * unit.transpose();
  sim.matrix = sim.matrix.cwiseMax(-1.0).cwiseMin(1.0);
  return sim;
}

RunEmbedding load_run_embedding(const std::string& dir) {
  RunEmbedding run;
  run.embedding = load_embedding(dir + "/embedding.txt", &run.tokens);
  run.acc = read_run_summary(dir).final_acc;
  return run;
}

SimMatrix average_sims(const std::vector<RunEmbedding>& runs, const std::string& task,
                       double threshold) {
  SimMatrix mean;
  int used = 0;
  for (const RunEmbedding& run : runs) {
    auto it = run.acc.find(task);
    if (it == run.acc.end() || !(it->second > threshold)) continue;
    SimMatrix sim = cosine_similarity(run.tokens, run.embedding);
    if (used == 0) {
      mean = std::move(sim);
    } else {
      if (sim.tokens != mean.tokens)
        raise("VocabMismatch", "qualifying runs disagree on the token list");
      mean.matrix += sim.matrix;
    }
    ++used;
  }
  if (used == 0)
    raise("NoQualifyingRuns", "no run exceeds " + fmt(threshold) + " on task " + task);
  mean.matrix /= double(used);
  return mean;
}

PcaResult pca_numbers(const SimMatrix& sim, int modulus, int k) {
  const long n = modulus;
  if (n < 1 || n > sim.matrix.rows())
    raise("BadModulus", std::to_string(modulus) + " number rows not present");
  if (k < 1 || k > n) raise("BadComponentCount", "k must be in [1, modulus]");

  MatX<double> x = sim.matrix.topRows(n);
  const Eigen::RowVectorXd col_mean = x.colwise().mean();
  x.rowwise() -= col_mean;

  const MatX<double> cov = (x.transpose() * x) / double(n > 1 ? n - 1 : 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) raise("EigenFailure", "eigendecomposition failed");
  const Eigen::VectorXd evals = solver.eigenvalues();  // ascending
  const Eigen::MatrixXd evecs = solver.eigenvectors();

  PcaResult out;
  const long v = cov.rows();
  out.variances = VecX<double>(k);
  out.components = MatX<double>(v, k);
  for (int j = 0; j < k; ++j) {
    out.variances(j) = std::max(0.0, evals(v - 1 - j));
    out.components.col(j) = evecs.col(v - 1 - j);
  }
  const double top = std::max(0.0, evals(v - 1));
  out.rank = 0;
  for (long i = 0; i < v; ++i)
    if (evals(i) > top * 1e-12 && evals(i) > 0) ++out.rank;
  out.rank_deficient = k > out.rank;

  out.coords = x * out.components;
  for (int j = 0; j < k; ++j) {
    long arg = 0;
    for (long i = 1; i < n; ++i)
      if (std::abs(out.coords(i, j)) > std::abs(out.coords(arg, j))) arg = i;
    if (out.coords(arg, j) < 0) {
      out.coords.col(j) = -out.coords.col(j);
      out.components.col(j) = -out.components.col(j);
    }
  }
  return out;
}

SeparationReport separation_score(const MatX<double>& coords, int modulus, int divisor) {
  if (divisor < 2) raise("BadDivisor", "divisor must be >= 2");
  if (divisor > modulus)
    raise("DivisorTooLarge", std::to_string(divisor) + " > modulus " + std::to_string(modulus));
  if (coords.rows() != modulus) raise("BadModulus", "coordinate rows must equal the modulus");

  const int k_used = int(std::min<long>(5, coords.cols()));
  SeparationReport rep;
  rep.divisor = divisor;
  rep.centroids = MatX<double>::Zero(divisor, k_used);
  rep.stds = MatX<double>::Zero(divisor, k_used);

  for (int j = 0; j < k_used; ++j) {
    const VecX<double> pc = coords.col(j);
    const double pooled = sample_std(pc);
    double within = 0;
    std::vector<double> mu(static_cast<size_t>(divisor));
    for (int r = 0; r < divisor; ++r) {
      std::vector<double> member;
      for (int i = r; i < modulus; i += divisor) member.push_back(pc(i));
      VecX<double> m = Eigen::Map<VecX<double>>(member.data(), long(member.size()));
      mu[size_t(r)] = m.mean();
      const double s = member.size() >= 2 ? sample_std(m) : pooled;
      rep.centroids(r, j) = mu[size_t(r)];
      rep.stds(r, j) = s;
      within += s;
    }
    within /= double(divisor);
    double between = 0;
    int pairs = 0;
    for (int r = 0; r < divisor; ++r)
      for (int q = r + 1; q < divisor; ++q) {
        between += std::abs(mu[size_t(r)] - mu[size_t(q)]);
        ++pairs;
      }
    between /= double(pairs);
    double score;
    if (within == 0)
      score = between > 0 ? 1e6 : 0.0;
    else
      score = std::min(between / within, 1e6);
    rep.per_pc.push_back(score);
  }
  rep.averaged = 0;
  for (double s : rep.per_pc) rep.averaged += s;
  rep.averaged /= double(rep.per_pc.size());
  return rep;
}

std::vector<int> candidate_divisors(int modulus) {
  std::set<int> ds;
  for (int d = 2; d <= 6 && d <= modulus; ++d) ds.insert(d);
  for (int d = 2; d <= modulus; ++d)
    if (modulus % d == 0) ds.insert(d);
  return {ds.begin(), ds.end()};
}

double separation_null_mean(int n, int d, int k, int trials, uint64_t seed) {
  Rng rng(seed);
  double total = 0;
  for (int t = 0; t < trials; ++t) {
    MatX<double> coords(n, k);
    for (long i = 0; i < coords.rows(); ++i)
      for (long j = 0; j < coords.cols(); ++j) coords(i, j) = rng.normal();
    total += separation_score(coords, n, d).averaged;
  }
  return total / double(trials);
}

std::vector<double> ordering_diagnostic(const MatX<double>& coords) {
  const long n = coords.rows();
  if (n < 3) raise("BadModulus", "need at least 3 numbers for an ordering diagnostic");
  std::vector<double> value_rank(static_cast<size_t>(n));
  for (long i = 0; i < n; ++i) value_rank[size_t(i)] = double(i + 1);
  std::vector<double> out;
  for (long j = 0; j < coords.cols(); ++j) {
    std::vector<double> pc(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i) pc[size_t(i)] = coords(i, j);
    out.push_back(pearson(ranks_of(pc), value_rank));
  }
  return out;
}

TwoSampleStats two_sample_stats(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) raise("EmptyEvalSet", "both samples must be nonempty");
  TwoSampleStats st;
  const auto mean = [](const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) s += x;
    return s / double(xs.size());
  };
  st.mean_a = mean(a);
  st.mean_b = mean(b);
  const auto var = [](const std::vector<double>& xs, double mu) {
    if (xs.size() < 2) return 0.0;
    double s = 0;
    for (double x : xs) s += (x - mu) * (x - mu);
    return s / double(xs.size() - 1);
  };
  const double va = var(a, st.mean_a);
  const double vb = var(b, st.mean_b);
  st.std_a = std::sqrt(va);
  st.std_b = std::sqrt(vb);
  const size_t na = a.size(), nb = b.size();
  double pooled = 0;
  if (na + nb > 2)
    pooled = std::sqrt((double(na - 1) * va + double(nb - 1) * vb) / double(na + nb - 2));
  st.cohen_d = pooled > 0 ? (st.mean_a - st.mean_b) / pooled : 0.0;

  std::vector<double> sa = a, sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  size_t ia = 0, ib = 0;
  double ks = 0;
  while (ia < na && ib < nb) {
    const double x = std::min(sa[ia], sb[ib]);
    while (ia < na && sa[ia] <= x) ++ia;
    while (ib < nb && sb[ib] <= x) ++ib;
    ks = std::max(ks, std::abs(double(ia) / double(na) - double(ib) / double(nb)));
  }
  st.ks = ks;
  return st;
}

NormRatioComparison compare_norm_ratios(const Params<float>& params_a, const ModelConfig& cfg_a,
                                        const Vocab& vocab_a, const Params<float>& params_b,
                                        const ModelConfig& cfg_b, const Vocab& vocab_b,
                                        const std::vector<std::string>& lines) {
  std::vector<double> attn_a, attn_b, ffwd_a, ffwd_b;
  size_t used = 0;
  for (const std::string& line : lines) {
    const std::vector<int> ids_a = tokenize(line, vocab_a);
    const std::vector<int> ids_b = tokenize(line, vocab_b);
    if (long(ids_a.size()) > cfg_a.context || long(ids_b.size()) > cfg_b.context) continue;
    const NormRatios ra = norm_ratios(params_a, cfg_a, ids_a);
    const NormRatios rb = norm_ratios(params_b, cfg_b, ids_b);
    for (const auto& step : ra.r_attn) attn_a.insert(attn_a.end(), step.begin(), step.end());
    for (const auto& step : ra.r_ffwd) ffwd_a.insert(ffwd_a.end(), step.begin(), step.end());
    for (const auto& step : rb.r_attn) attn_b.insert(attn_b.end(), step.begin(), step.end());
    for (const auto& step : rb.r_ffwd) ffwd_b.insert(ffwd_b.end(), step.begin(), step.end());
    ++used;
  }
  if (used == 0) raise("EmptyEvalSet", "no eval line fits both model contexts");
  NormRatioComparison cmp;
  cmp.attn = two_sample_stats(attn_a, attn_b);
  cmp.ffwd = two_sample_stats(ffwd_a, ffwd_b);
  cmp.lines_used = used;
  return cmp;
}

void write_pca_csv(const std::string& path, const PcaResult& pca, int modulus) {
  std::ofstream out(path);
  if (!out) raise("IoError", "cannot open " + path);
  out << "token,value";
  for (long j = 0; j < pca.coords.cols(); ++j) out << ",PC" << (j + 1);
  out << "\n";
  for (int i = 0; i < modulus; ++i) {
    out << i << ',' << i;
    for (long j = 0; j < pca.coords.cols(); ++j) out << ',' << fmt(pca.coords(i, j));
    out << "\n";
  }
}

void write_separation_csv(const std::string& path, const std::string& mix, int modulus,
                          const std::vector<SeparationReport>& reports) {
  std::ofstream out(path);
  if (!out) raise("IoError", "cannot open " + path);
  out << "mix,n,d,score_pc1,score_pc2,score_pc3,score_pc4,score_pc5,avg\n";
  for (const SeparationReport& rep : reports) {
    out << mix << ',' << modulus << ',' << rep.divisor;
    for (int j = 0; j < 5; ++j) {
      out << ',';
      if (j < int(rep.per_pc.size())) out << fmt(rep.per_pc[size_t(j)]);
    }
    out << ',' << fmt(rep.averaged) << "\n";
  }
}

void write_normratio_csv(const std::string& path, const NormRatioComparison& cmp) {
  std::ofstream out(path);
  if (!out) raise("IoError", "cannot open " + path);
  out << "block,mean_a,std_a,mean_b,std_b,cohen_d,ks\n";
  const auto row = [&](const char* name, const TwoSampleStats& st) {
    out << name << ',' << fmt(st.mean_a) << ',' << fmt(st.std_a) << ',' << fmt(st.mean_b) << ','
        << fmt(st.std_b) << ',' << fmt(st.cohen_d) << ',' << fmt(st.ks) << "\n";
  };
  row("attn", cmp.attn);
  row("ffwd", cmp.ffwd);
}

}  // namespace listops
