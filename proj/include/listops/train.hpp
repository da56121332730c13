// Training loop: Adam with cosine learning-rate decay, packed next-token
// batches mixed i.i.d. across tasks, optional curriculum ramp between two
// task mixtures, plateau-based early stopping, greedy-decoding evaluation,
// and run-directory persistence.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "listops/model.hpp"
#include "listops/rng.hpp"
#include "listops/vocab.hpp"

namespace listops {

struct TrainConfig {
  int batch_size = 64;
  int max_iters = 20000;
  double lr_peak = 1e-3;
  double lr_floor = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.99;
  double adam_eps = 1e-8;
  int eval_interval = 100;
  int eval_samples = 200;        // test lines decoded per task at each evaluation
  int final_eval_samples = 1000;
  bool early_stop = true;
  double early_stop_delta = 2.5e-4;  // plateau threshold on the probe loss
  int early_stop_patience = 10;      // consecutive evaluations under the threshold
  int early_stop_warmup = 2000;      // no stop before this iteration
  int probe_batches = 4;             // fixed batches whose loss is the plateau statistic
  uint64_t seed = 1;
};

void validate_train(const TrainConfig& cfg);

// Probability that an example is drawn from the target mixture.
struct CurriculumSchedule {
  int ramp_start = 10000;
  int ramp_end = 20000;
};
double mix_lambda(const CurriculumSchedule& s, int step);
void validate_schedule(const CurriculumSchedule& s, int max_iters);

// One task's lines under the shared vocabulary of the mixture.
struct TaskDataset {
  std::string name;
  std::vector<std::string> train;
  std::vector<std::string> test;
};

struct MetricRow {
  int step = 0;
  double train_loss = 0;  // mean over the interval ending at this step
  double probe_loss = 0;
  double lr = 0;
  std::map<std::string, double> acc;
  std::map<std::string, double> eval_loss;
};

struct RunRecord {
  ModelConfig model;
  TrainConfig train;
  std::vector<std::string> task_names;  // evaluation order
  std::vector<MetricRow> history;
  std::map<std::string, double> final_acc;
  std::map<std::string, double> final_loss;
  long long params = 0;
  int stopped_at = 0;
  std::string stop_reason;  // "max_iters" or "early_stop"
  double wall_seconds = 0;
  Params<float> weights;
  std::vector<std::string> vocab_tokens;
};

// Trains on `tasks` mixed uniformly per example. With a schedule, examples
// come from `scaffold` with probability 1-lambda(step) and from `tasks`
// with lambda(step). All lines must tokenize under `vocab`.
RunRecord train(const ModelConfig& model_cfg, const TrainConfig& train_cfg, const Vocab& vocab,
                const std::vector<TaskDataset>& tasks,
                const std::vector<TaskDataset>& scaffold = {},
                const std::optional<CurriculumSchedule>& schedule = std::nullopt);

struct EvalResult {
  double accuracy = 0;
  double mean_loss = 0;   // per-token cross-entropy of reference continuations
  int evaluated = 0;
  int malformed = 0;      // lines without "=" or longer than the context
};

// Greedy decoding from the prompt (prefix through the first ">"): accuracy is
// whether the first generated token after the first "=" matches the reference
// answer token. Samples up to n_samples lines without replacement.
EvalResult evaluate(const Params<float>& params, const ModelConfig& cfg, const Vocab& vocab,
                    const std::vector<std::string>& lines, int n_samples, Rng& rng);

// Run directory: config.txt, metrics.csv, checkpoint.bin, embedding.txt,
// result.txt. Refuses to overwrite an existing run.
void write_run_dir(const std::string& dir, const RunRecord& record);
// Minimal facts needed to reuse a finished run without retraining.
struct RunSummary {
  long long params = 0;
  int stopped_at = 0;
  std::map<std::string, double> final_acc;
  std::map<std::string, double> final_loss;
};
bool run_dir_complete(const std::string& dir);
RunSummary read_run_summary(const std::string& dir);

}  // namespace listops
