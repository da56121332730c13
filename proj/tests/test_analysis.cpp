#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "listops/analysis.hpp"
#include "listops/common.hpp"
#include "listops/domain.hpp"
#include "listops/rng.hpp"
#include "listops/train.hpp"

using namespace listops;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> fake_tokens(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

MatX<double> random_embedding(int rows, int cols, uint64_t seed) {
  Rng rng(seed);
  MatX<double> e(rows, cols);
  for (long i = 0; i < e.rows(); ++i)
    for (long j = 0; j < e.cols(); ++j) e(i, j) = rng.normal();
  return e;
}

// Orthonormal basis of R^n from QR of a random matrix.
MatX<double> random_orthogonal(int n, uint64_t seed) {
  Eigen::MatrixXd a = random_embedding(n, n, seed);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  return q;
}

}  // namespace

TEST_CASE("cosine similarity of orthonormal rows is the identity") {
  const int n = 5;
  MatX<double> e = MatX<double>::Identity(n, n) * 3.0;
  SimMatrix sim = cosine_similarity(fake_tokens(n), e);
  CHECK((sim.matrix - MatX<double>::Identity(n, n)).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK(sim.tokens.size() == size_t(n));
}

TEST_CASE("cosine similarity matches a hand-computed 3x2 case") {
  MatX<double> e(3, 2);
  e << 1, 0, 1, 1, 0, 2;
  SimMatrix sim = cosine_similarity(fake_tokens(3), e);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(sim.matrix(0, 1) == doctest::Approx(r));
  CHECK(sim.matrix(0, 2) == doctest::Approx(0.0));
  CHECK(sim.matrix(1, 2) == doctest::Approx(r));
  for (int i = 0; i < 3; ++i) CHECK(sim.matrix(i, i) == doctest::Approx(1.0));
  CHECK((sim.matrix - sim.matrix.transpose()).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("a zero-norm embedding row names its token") {
  MatX<double> e = MatX<double>::Ones(3, 4);
  e.row(1).setZero();
  try {
    cosine_similarity(fake_tokens(3), e);
    FAIL("expected ZeroNormRow");
  } catch (const Error& err) {
    CHECK(err.kind() == "ZeroNormRow");
    CHECK(std::string(err.what()).find("1") != std::string::npos);
  }
}

TEST_CASE("average_sims filters by task accuracy and averages entrywise") {
  const int n = 4, d = 3;
  RunEmbedding lo{fake_tokens(n), random_embedding(n, d, 1), {{"add", 0.5}}};
  RunEmbedding hi1{fake_tokens(n), random_embedding(n, d, 2), {{"add", 0.95}}};
  RunEmbedding hi2{fake_tokens(n), random_embedding(n, d, 3), {{"add", 0.99}, {"max", 0.2}}};

  SUBCASE("one qualifying run reproduces its own similarities") {
    SimMatrix got = average_sims({lo, hi1}, "add", 0.9);
    SimMatrix direct = cosine_similarity(hi1.tokens, hi1.embedding);
    CHECK((got.matrix - direct.matrix).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  }
  SUBCASE("mean of two runs equals the independently computed mean") {
    SimMatrix got = average_sims({lo, hi1, hi2}, "add", 0.9);
    MatX<double> expect = (cosine_similarity(hi1.tokens, hi1.embedding).matrix +
                           cosine_similarity(hi2.tokens, hi2.embedding).matrix) /
                          2.0;
    CHECK((got.matrix - expect).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("run order does not change the average") {
    SimMatrix a = average_sims({hi1, lo, hi2}, "add", 0.9);
    SimMatrix b = average_sims({hi2, hi1, lo}, "add", 0.9);
    CHECK((a.matrix - b.matrix).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  }
  SUBCASE("an impossible threshold raises NoQualifyingRuns") {
    try {
      average_sims({lo, hi1, hi2}, "add", 1.01);
      FAIL("expected NoQualifyingRuns");
    } catch (const Error& err) {
      CHECK(err.kind() == "NoQualifyingRuns");
    }
  }
  SUBCASE("runs missing the task never qualify") {
    try {
      average_sims({lo, hi1, hi2}, "prod", 0.0);
      FAIL("expected NoQualifyingRuns");
    } catch (const Error& err) {
      CHECK(err.kind() == "NoQualifyingRuns");
    }
  }
}

TEST_CASE("pca components are orthonormal with nonincreasing variances") {
  const int v = 12, n = 10, k = 4;
  MatX<double> e = random_embedding(v, 6, 7);
  SimMatrix sim = cosine_similarity(fake_tokens(v), e);
  PcaResult pca = pca_numbers(sim, n, k);

  REQUIRE(pca.coords.rows() == n);
  REQUIRE(pca.coords.cols() == k);
  MatX<double> gram = pca.components.transpose() * pca.components;
  CHECK((gram - MatX<double>::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-8);
  for (int j = 0; j + 1 < k; ++j) CHECK(pca.variances(j) >= pca.variances(j + 1));
  CHECK(pca.variances(k - 1) >= 0.0);
  CHECK_FALSE(pca.rank_deficient);
}

TEST_CASE("pca coordinate variance matches the reported eigenvalue") {
  const int v = 9, n = 8, k = 3;
  SimMatrix sim = cosine_similarity(fake_tokens(v), random_embedding(v, 5, 11));
  PcaResult pca = pca_numbers(sim, n, k);
  for (int j = 0; j < k; ++j) {
    const VecX<double> c = pca.coords.col(j);
    const double var = (c.array() - c.mean()).square().sum() / double(n - 1);
    CHECK(var == doctest::Approx(pca.variances(j)).epsilon(1e-9));
  }
}

TEST_CASE("pca is invariant to an orthogonal change of embedding basis") {
  const int v = 10, n = 8, k = 3;
  MatX<double> e = random_embedding(v, 6, 13);
  MatX<double> q = random_orthogonal(6, 14);
  SimMatrix sa = cosine_similarity(fake_tokens(v), e);
  SimMatrix sb = cosine_similarity(fake_tokens(v), MatX<double>(e * q));
  CHECK((sa.matrix - sb.matrix).cwiseAbs().maxCoeff() < 1e-12);
  PcaResult pa = pca_numbers(sa, n, k);
  PcaResult pb = pca_numbers(sb, n, k);
  CHECK((pa.coords - pb.coords).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("pca sign convention puts each component's largest coordinate positive") {
  SimMatrix sim = cosine_similarity(fake_tokens(11), random_embedding(11, 7, 17));
  PcaResult pca = pca_numbers(sim, 9, 4);
  for (int j = 0; j < 4; ++j) {
    long arg = 0;
    for (long i = 1; i < pca.coords.rows(); ++i)
      if (std::abs(pca.coords(i, j)) > std::abs(pca.coords(arg, j))) arg = i;
    CHECK(pca.coords(arg, j) > 0.0);
  }
}

TEST_CASE("identical number rows make a rank-deficient pca") {
  const int v = 6, n = 4;
  MatX<double> e = MatX<double>::Zero(v, 3);
  for (int i = 0; i < v; ++i) e.row(i) << 1, 2, 3;
  e.row(4) << 5, -1, 0;
  e.row(5) << 0, 0, 9;
  SimMatrix sim = cosine_similarity(fake_tokens(v), e);
  PcaResult pca = pca_numbers(sim, n, 2);
  CHECK(pca.rank == 0);
  CHECK(pca.rank_deficient);
  CHECK(pca.coords.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK(pca.variances.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("separation score rewards tight residue clusters") {
  const int n = 12, d = 2;
  SUBCASE("exactly clustered classes hit the sentinel") {
    MatX<double> coords = MatX<double>::Zero(n, 1);
    for (int i = 0; i < n; ++i) coords(i, 0) = (i % d == 0) ? 1.0 : -1.0;
    SeparationReport rep = separation_score(coords, n, d);
    CHECK(rep.per_pc.size() == 1);
    CHECK(rep.per_pc[0] == 1e6);
    CHECK(rep.averaged == 1e6);
    CHECK(rep.centroids(0, 0) == doctest::Approx(1.0));
    CHECK(rep.centroids(1, 0) == doctest::Approx(-1.0));
  }
  SUBCASE("identical coordinates everywhere score zero") {
    MatX<double> coords = MatX<double>::Ones(n, 2);
    SeparationReport rep = separation_score(coords, n, d);
    CHECK(rep.averaged == doctest::Approx(0.0));
  }
  SUBCASE("score falls as within-class noise grows") {
    Rng rng(5);
    std::vector<double> noise(static_cast<size_t>(n));
    for (double& x : noise) x = rng.normal();
    double prev = 1e18;
    for (double sigma : {0.01, 0.1, 1.0}) {
      MatX<double> coords(n, 1);
      for (int i = 0; i < n; ++i)
        coords(i, 0) = ((i % d == 0) ? 1.0 : -1.0) + sigma * noise[size_t(i)];
      const double score = separation_score(coords, n, d).averaged;
      CHECK(score < prev);
      prev = score;
    }
  }
}

TEST_CASE("separation score is invariant to per-pc sign flips and shifts") {
  const int n = 10, d = 5;
  MatX<double> coords = random_embedding(n, 3, 19);
  SeparationReport base = separation_score(coords, n, d);
  MatX<double> flipped = coords;
  flipped.col(1) = -flipped.col(1);
  SeparationReport f = separation_score(flipped, n, d);
  for (size_t j = 0; j < base.per_pc.size(); ++j) CHECK(f.per_pc[j] == base.per_pc[j]);
  MatX<double> shifted = coords;
  shifted.col(0).array() += 100.0;
  SeparationReport s = separation_score(shifted, n, d);
  CHECK(s.averaged == doctest::Approx(base.averaged).epsilon(1e-9));
}

TEST_CASE("separation uses at most five components") {
  MatX<double> coords = random_embedding(10, 8, 23);
  SeparationReport rep = separation_score(coords, 10, 2);
  CHECK(rep.per_pc.size() == 5);
  CHECK(rep.centroids.cols() == 5);
}

TEST_CASE("separation rejects a divisor above the modulus") {
  MatX<double> coords = random_embedding(6, 2, 29);
  try {
    separation_score(coords, 6, 7);
    FAIL("expected DivisorTooLarge");
  } catch (const Error& err) {
    CHECK(err.kind() == "DivisorTooLarge");
  }
}

TEST_CASE("candidate divisors merge the small-range scan with true divisors") {
  CHECK(candidate_divisors(10) == std::vector<int>{2, 3, 4, 5, 6, 10});
  CHECK(candidate_divisors(20) == std::vector<int>{2, 3, 4, 5, 6, 10, 20});
  CHECK(candidate_divisors(4) == std::vector<int>{2, 3, 4});
  CHECK(candidate_divisors(7) == std::vector<int>{2, 3, 4, 5, 6, 7});
}

TEST_CASE("random coordinates stay far below the clustered sentinel") {
  const double null_mean = separation_null_mean(40, 2, 5, 20, 31);
  CHECK(null_mean > 0.0);
  CHECK(null_mean < 2.0);
}

TEST_CASE("ordering diagnostic recovers monotone arrangements") {
  const int n = 9;
  MatX<double> coords(n, 3);
  for (int i = 0; i < n; ++i) {
    coords(i, 0) = 2.0 * i + 1.0;
    coords(i, 1) = -0.5 * i;
    coords(i, 2) = 7.0;
  }
  std::vector<double> rho = ordering_diagnostic(coords);
  REQUIRE(rho.size() == 3);
  CHECK(rho[0] == doctest::Approx(1.0));
  CHECK(rho[1] == doctest::Approx(-1.0));
  CHECK(rho[2] == doctest::Approx(0.0));
}

TEST_CASE("ordering diagnostic averages tied ranks") {
  MatX<double> coords(4, 1);
  coords << 0.0, 1.0, 1.0, 2.0;
  std::vector<double> rho = ordering_diagnostic(coords);
  // ranks: 1, 2.5, 2.5, 4 against 1,2,3,4
  const double expect = 3.0 / std::sqrt(10.0);
  CHECK(rho[0] == doctest::Approx(expect));
}

TEST_CASE("two-sample stats on a sample against itself are null") {
  std::vector<double> a = {0.1, 0.4, 0.9, 1.3, 2.2};
  TwoSampleStats st = two_sample_stats(a, a);
  CHECK(st.cohen_d == 0.0);
  CHECK(st.ks == 0.0);
  CHECK(st.mean_a == st.mean_b);
}

TEST_CASE("two-sample stats match a hand-computed shifted case") {
  std::vector<double> a = {1, 2, 3};
  std::vector<double> b = {3, 4, 5};
  TwoSampleStats st = two_sample_stats(a, b);
  CHECK(st.mean_a == doctest::Approx(2.0));
  CHECK(st.mean_b == doctest::Approx(4.0));
  CHECK(st.std_a == doctest::Approx(1.0));
  CHECK(st.std_b == doctest::Approx(1.0));
  CHECK(st.cohen_d == doctest::Approx(-2.0));
  CHECK(st.ks == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("norm-ratio comparison of a model against itself is null") {
  TaskSpec spec;
  spec.ops = {OpKind::Add};
  spec.modulus = 6;
  validate_task(spec);
  Domain dom = make_domain(spec);
  Vocab vocab = make_vocab(dom);

  ModelConfig cfg;
  cfg.n_embed = 8;
  cfg.context = 32;
  cfg.vocab_size = vocab.size();
  Rng rng(3);
  Params<float> params;
  params.init(cfg, rng);

  std::vector<std::string> lines = {"add_6 ( 1 2 3 )=0<eos>", "add_6 ( 5 5 1 )=5<eos>"};
  NormRatioComparison cmp =
      compare_norm_ratios(params, cfg, vocab, params, cfg, vocab, lines);
  CHECK(cmp.lines_used == 2);
  CHECK(cmp.attn.cohen_d == doctest::Approx(0.0));
  CHECK(cmp.attn.ks == doctest::Approx(0.0));
  CHECK(cmp.ffwd.cohen_d == doctest::Approx(0.0));
  CHECK(cmp.attn.mean_a > 0.0);

  SUBCASE("lines beyond both contexts raise EmptyEvalSet") {
    ModelConfig tiny = cfg;
    tiny.context = 2;
    try {
      compare_norm_ratios(params, tiny, vocab, params, tiny, vocab, lines);
      FAIL("expected EmptyEvalSet");
    } catch (const Error& err) {
      CHECK(err.kind() == "EmptyEvalSet");
    }
  }
}

TEST_CASE("analysis csv writers emit the documented headers") {
  const fs::path dir = fs::temp_directory_path() / "listops_analysis_csv";
  fs::create_directories(dir);
  SimMatrix sim = cosine_similarity(fake_tokens(8), random_embedding(8, 4, 37));
  PcaResult pca = pca_numbers(sim, 6, 3);
  write_pca_csv((dir / "pca.csv").string(), pca, 6);
  {
    std::ifstream in(dir / "pca.csv");
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == "token,value,PC1,PC2,PC3");
    CHECK(first.rfind("0,0,", 0) == 0);
    int rows = 1;
    for (std::string line; std::getline(in, line);)
      if (!line.empty()) ++rows;
    CHECK(rows == 6);
  }
  std::vector<SeparationReport> reps = {separation_score(pca.coords, 6, 2),
                                        separation_score(pca.coords, 6, 3)};
  write_separation_csv((dir / "separation.csv").string(), "add", 6, reps);
  {
    std::ifstream in(dir / "separation.csv");
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == "mix,n,d,score_pc1,score_pc2,score_pc3,score_pc4,score_pc5,avg");
    CHECK(first.rfind("add,6,2,", 0) == 0);
    CHECK(std::count(first.begin(), first.end(), ',') == 8);
  }
  TwoSampleStats st;
  st.mean_a = 1.5;
  NormRatioComparison cmp;
  cmp.attn = st;
  cmp.ffwd = st;
  write_normratio_csv((dir / "normratio.csv").string(), cmp);
  {
    std::ifstream in(dir / "normratio.csv");
    std::string header, a, f;
    std::getline(in, header);
    std::getline(in, a);
    std::getline(in, f);
    CHECK(header == "block,mean_a,std_a,mean_b,std_b,cohen_d,ks");
    CHECK(a.rfind("attn,1.5,", 0) == 0);
    CHECK(f.rfind("ffwd,1.5,", 0) == 0);
  }
  fs::remove_all(dir);
}

TEST_CASE("run-directory embeddings round trip through the loader") {
  const fs::path dir = fs::temp_directory_path() / "listops_analysis_run";
  fs::create_directories(dir);
  const std::vector<std::string> tokens = fake_tokens(4);
  MatX<float> e(4, 3);
  for (long i = 0; i < e.rows(); ++i)
    for (long j = 0; j < e.cols(); ++j) e(i, j) = float(i * 10 + j) * 0.25f;
  save_embedding((dir / "embedding.txt").string(), tokens, e);
  {
    std::ofstream os(dir / "result.txt");
    os << "params = 123\nstopped_at = 10\nreason = max_iters\nwall_seconds = 1.5\n";
    os << "acc_add = 0.75\nloss_add = 0.5\n";
  }

  RunEmbedding run = load_run_embedding(dir.string());
  CHECK(run.tokens == tokens);
  CHECK(run.embedding.rows() == 4);
  CHECK(run.embedding(2, 1) == doctest::Approx(5.25));
  CHECK(run.acc.at("add") == doctest::Approx(0.75));
  fs::remove_all(dir);
}
