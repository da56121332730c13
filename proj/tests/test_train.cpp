#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "listops/common.hpp"
#include "listops/dataset.hpp"
#include "listops/domain.hpp"
#include "listops/task.hpp"
#include "listops/train.hpp"
#include "listops/vocab.hpp"

using namespace listops;

namespace {

struct Fixture {
  Vocab vocab;
  std::vector<TaskDataset> tasks;
};

// Small single-op corpus split 80/20 without the exclusion machinery.
// Lines longer than max_tokens are dropped so the whole corpus fits a short
// evaluation context.
Fixture make_fixture(OpKind op, int lines, uint64_t seed, size_t max_tokens = 48) {
  TaskSpec spec;
  spec.ops = {op};
  validate_task(spec);
  Domain dom = make_domain(spec);
  Rng rng(seed);
  auto all = generate_lines(dom, lines, rng);
  Fixture fx;
  fx.vocab = make_vocab(dom);
  std::erase_if(all, [&](const std::string& line) {
    return tokenize(line, fx.vocab).size() > max_tokens;
  });
  TaskDataset td;
  td.name = ops_name(spec.ops);
  const size_t cut = all.size() * 4 / 5;
  td.train.assign(all.begin(), all.begin() + cut);
  td.test.assign(all.begin() + cut, all.end());
  fx.tasks.push_back(std::move(td));
  return fx;
}

ModelConfig small_model(const Vocab& vocab, int d = 8, int context = 48) {
  ModelConfig m;
  m.n_embed = d;
  m.context = context;
  m.vocab_size = int(vocab.size());
  return m;
}

TrainConfig quick_train(int iters, int interval) {
  TrainConfig t;
  t.batch_size = 4;
  t.max_iters = iters;
  t.eval_interval = interval;
  t.eval_samples = 20;
  t.final_eval_samples = 50;
  t.early_stop = false;
  t.probe_batches = 2;
  t.seed = 7;
  return t;
}

}  // namespace

TEST_CASE("curriculum mix ratio ramps linearly between its endpoints") {
  CurriculumSchedule s{100, 200};
  CHECK(mix_lambda(s, 0) == 0.0);
  CHECK(mix_lambda(s, 99) == 0.0);
  CHECK(mix_lambda(s, 100) == 0.0);
  CHECK(mix_lambda(s, 150) == doctest::Approx(0.5));
  CHECK(mix_lambda(s, 200) == 1.0);
  CHECK(mix_lambda(s, 5000) == 1.0);
  double prev = -1;
  for (int step = 0; step < 300; ++step) {
    const double lam = mix_lambda(s, step);
    CHECK(lam >= prev);
    CHECK(lam >= 0.0);
    CHECK(lam <= 1.0);
    prev = lam;
  }
}

TEST_CASE("adjacent ramp endpoints behave as a hard switch") {
  CurriculumSchedule s{99, 100};
  CHECK(mix_lambda(s, 98) == 0.0);
  CHECK(mix_lambda(s, 99) == 0.0);
  CHECK(mix_lambda(s, 100) == 1.0);
}

TEST_CASE("schedule and train config validation") {
  CHECK_THROWS_AS(validate_schedule({200, 100}, 1000), Error);
  CHECK_THROWS_AS(validate_schedule({100, 100}, 1000), Error);
  CHECK_THROWS_AS(validate_schedule({100, 2000}, 1000), Error);
  CHECK_NOTHROW(validate_schedule({100, 1000}, 1000));

  TrainConfig t;
  t.lr_floor = 2e-3;
  CHECK_THROWS_AS(validate_train(t), Error);
  t = TrainConfig{};
  t.early_stop_patience = 0;
  CHECK_THROWS_AS(validate_train(t), Error);
  t = TrainConfig{};
  CHECK_NOTHROW(validate_train(t));
}

TEST_CASE("training replays bit for bit under one seed") {
  Fixture fx = make_fixture(OpKind::Max, 400, 3);
  ModelConfig m = small_model(fx.vocab);
  TrainConfig t = quick_train(30, 10);
  RunRecord a = train(m, t, fx.vocab, fx.tasks);
  RunRecord b = train(m, t, fx.vocab, fx.tasks);
  REQUIRE(a.history.size() == b.history.size());
  for (size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].step == b.history[i].step);
    CHECK(a.history[i].train_loss == b.history[i].train_loss);
    CHECK(a.history[i].probe_loss == b.history[i].probe_loss);
    CHECK(a.history[i].acc == b.history[i].acc);
    CHECK(a.history[i].eval_loss == b.history[i].eval_loss);
  }
  CHECK(a.final_acc == b.final_acc);
  CHECK(a.final_loss == b.final_loss);
  auto ra = a.weights.tensor_refs();
  auto rb = b.weights.tensor_refs();
  for (size_t i = 0; i < ra.size(); ++i)
    for (long long j = 0; j < ra[i].size; ++j) REQUIRE(ra[i].data[j] == rb[i].data[j]);

  TrainConfig t2 = t;
  t2.seed = 8;
  RunRecord c = train(m, t2, fx.vocab, fx.tasks);
  CHECK(c.history.front().train_loss != a.history.front().train_loss);
}

TEST_CASE("history steps strictly increase and metrics stay in range") {
  Fixture fx = make_fixture(OpKind::Add, 300, 4);
  ModelConfig m = small_model(fx.vocab);
  RunRecord rec = train(m, quick_train(25, 10), fx.vocab, fx.tasks);
  CHECK(rec.stop_reason == "max_iters");
  CHECK(rec.stopped_at == 25);
  REQUIRE(rec.history.size() == 3);  // steps 10, 20, 25
  int prev = 0;
  for (const auto& row : rec.history) {
    CHECK(row.step > prev);
    prev = row.step;
    for (const auto& [name, acc] : row.acc) {
      CHECK(acc >= 0.0);
      CHECK(acc <= 1.0);
      CHECK(name == "add");
    }
    CHECK(row.train_loss > 0);
  }
  CHECK(rec.params == count_params(m));
}

TEST_CASE("early stopping waits for the warmup boundary") {
  Fixture fx = make_fixture(OpKind::Max, 300, 5);
  ModelConfig m = small_model(fx.vocab);
  TrainConfig t = quick_train(300, 10);
  t.early_stop = true;
  t.early_stop_delta = 1e9;  // every evaluation counts as a plateau
  t.early_stop_patience = 1;
  t.early_stop_warmup = 50;
  RunRecord rec = train(m, t, fx.vocab, fx.tasks);
  CHECK(rec.stop_reason == "early_stop");
  CHECK(rec.stopped_at == 50);  // patience was met long before warmup allowed a stop
}

TEST_CASE("a tiny memorized corpus decodes perfectly") {
  TaskSpec spec;
  spec.ops = {OpKind::Max};
  validate_task(spec);
  Domain dom = make_domain(spec);
  Rng rng(9);
  auto lines = generate_lines(dom, 80, rng);
  Vocab vocab = make_vocab(dom);
  std::erase_if(lines, [&](const std::string& line) {
    return tokenize(line, vocab).size() > 48;
  });
  REQUIRE(lines.size() >= 6);
  lines.resize(6);
  TaskDataset td{"max", lines, lines};

  ModelConfig m;
  m.n_embed = 24;
  m.context = 48;
  m.vocab_size = int(vocab.size());
  TrainConfig t = quick_train(1500, 500);
  t.final_eval_samples = 6;
  RunRecord rec = train(m, t, vocab, {td});
  CHECK(rec.final_acc.at("max") == 1.0);
}

TEST_CASE("an untrained model scores near chance") {
  Fixture fx = make_fixture(OpKind::Add, 1200, 6);
  ModelConfig m = small_model(fx.vocab, 16);
  Rng init(123);
  Params<float> p;
  p.init(m, init);
  Rng eval_rng(77);
  EvalResult r = evaluate(p, m, fx.vocab, fx.tasks[0].test, 1000, eval_rng);
  const double v = double(fx.vocab.size());
  const double sigma = std::sqrt((1.0 / v) * (1 - 1.0 / v) / double(r.evaluated));
  CHECK(r.accuracy < 1.0 / v + 3 * sigma);
  CHECK(r.mean_loss > 0.5 * std::log(v));  // near-uniform predictive distribution
}

TEST_CASE("evaluation skips malformed lines and counts them") {
  Fixture fx = make_fixture(OpKind::Max, 200, 8);
  ModelConfig m = small_model(fx.vocab);
  Rng init(5);
  Params<float> p;
  p.init(m, init);
  std::vector<std::string> lines = fx.tasks[0].test;
  const size_t good = lines.size();
  lines.push_back("max_10(1 2)");  // no equals sign
  std::string overlong = "max_10(";  // tokenizes past the 48-token context
  for (int i = 0; i < 60; ++i) overlong += " 1";
  overlong += " )=1<eos>";
  lines.push_back(overlong);
  Rng eval_rng(3);
  EvalResult r = evaluate(p, m, fx.vocab, lines, int(lines.size()), eval_rng);
  CHECK(r.malformed == 2);
  CHECK(r.evaluated == int(good));
}

TEST_CASE("vocabulary mismatches and empty datasets are rejected") {
  Fixture fx = make_fixture(OpKind::Max, 200, 10);
  ModelConfig m = small_model(fx.vocab);
  TrainConfig t = quick_train(5, 5);

  std::vector<TaskDataset> bad = fx.tasks;
  bad[0].train.push_back("med_10(1 2)>1=1<eos>");  // op token outside the vocab
  CHECK_THROWS_WITH_AS(train(m, t, fx.vocab, bad), doctest::Contains("VocabMismatch"), Error);

  std::vector<TaskDataset> empty = fx.tasks;
  empty[0].train.clear();
  CHECK_THROWS_WITH_AS(train(m, t, fx.vocab, empty), doctest::Contains("EmptyDataset"), Error);

  CHECK_THROWS_AS(train(m, t, fx.vocab, {}), Error);

  std::vector<TaskDataset> scaffold = fx.tasks;
  CHECK_THROWS_WITH_AS(train(m, t, fx.vocab, fx.tasks, scaffold, std::nullopt),
                       doctest::Contains("BadSchedule"), Error);
}

TEST_CASE("curriculum runs mix scaffold and target tasks") {
  Fixture target = make_fixture(OpKind::Add, 300, 11);
  Fixture scaffold_src = make_fixture(OpKind::Add, 300, 12);
  // Reuse one vocabulary: both fixtures are mod-10 ADD, so tokens agree.
  std::vector<TaskDataset> scaffold = scaffold_src.tasks;
  scaffold[0].name = "scaffold_add";
  ModelConfig m = small_model(target.vocab);
  TrainConfig t = quick_train(20, 10);
  CurriculumSchedule s{5, 15};
  RunRecord rec = train(m, t, target.vocab, target.tasks, scaffold, s);
  CHECK(rec.stopped_at == 20);
  REQUIRE(rec.history.size() == 2);
  CHECK(rec.history[0].acc.count("add") == 1);
  CHECK(rec.history[0].acc.count("scaffold_add") == 1);
  CHECK(rec.final_acc.count("scaffold_add") == 1);
}

TEST_CASE("run directories persist and refuse collisions") {
  Fixture fx = make_fixture(OpKind::Max, 250, 13);
  ModelConfig m = small_model(fx.vocab);
  RunRecord rec = train(m, quick_train(10, 5), fx.vocab, fx.tasks);
  const auto dir =
      (std::filesystem::temp_directory_path() / "listops_run_test").string();
  std::filesystem::remove_all(dir);
  CHECK(!run_dir_complete(dir));
  write_run_dir(dir, rec);
  CHECK(run_dir_complete(dir));

  RunSummary s = read_run_summary(dir);
  CHECK(s.params == rec.params);
  CHECK(s.stopped_at == rec.stopped_at);
  CHECK(s.final_acc.at("max") == doctest::Approx(rec.final_acc.at("max")).epsilon(1e-9));

  ModelConfig loaded_cfg;
  Params<float> loaded;
  load_checkpoint((std::filesystem::path(dir) / "checkpoint.bin").string(), loaded_cfg, loaded);
  CHECK(loaded_cfg.n_embed == m.n_embed);
  auto ra = rec.weights.tensor_refs();
  auto rb = loaded.tensor_refs();
  for (size_t i = 0; i < ra.size(); ++i)
    for (long long j = 0; j < ra[i].size; ++j) REQUIRE(ra[i].data[j] == rb[i].data[j]);

  CHECK_THROWS_WITH_AS(write_run_dir(dir, rec), doctest::Contains("RunDirExists"), Error);
  std::filesystem::remove_all(dir);
}
