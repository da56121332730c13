#include "listops/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "listops/common.hpp"

namespace listops {

void validate_train(const TrainConfig& cfg) {
  if (cfg.batch_size < 1) raise("BadTrainConfig", "batch_size must be >= 1");
  if (cfg.max_iters < 1) raise("BadTrainConfig", "max_iters must be >= 1");
  if (cfg.lr_floor > cfg.lr_peak) raise("BadTrainConfig", "lr_floor must not exceed lr_peak");
  if (cfg.lr_floor <= 0) raise("BadTrainConfig", "lr_floor must be positive");
  if (cfg.eval_interval < 1) raise("BadTrainConfig", "eval_interval must be >= 1");
  if (cfg.eval_samples < 1 || cfg.final_eval_samples < 1)
    raise("BadTrainConfig", "evaluation sample counts must be >= 1");
  if (cfg.early_stop_patience < 1) raise("BadTrainConfig", "patience must be >= 1");
  if (cfg.early_stop_delta <= 0) raise("BadTrainConfig", "early_stop_delta must be positive");
  if (cfg.probe_batches < 1) raise("BadTrainConfig", "probe_batches must be >= 1");
}

double mix_lambda(const CurriculumSchedule& s, int step) {
  if (step < s.ramp_start) return 0.0;
  if (step >= s.ramp_end) return 1.0;
  return double(step - s.ramp_start) / double(s.ramp_end - s.ramp_start);
}

void validate_schedule(const CurriculumSchedule& s, int max_iters) {
  if (s.ramp_start < 0) raise("BadSchedule", "ramp_start must be >= 0");
  if (s.ramp_start >= s.ramp_end) raise("BadSchedule", "ramp_start must precede ramp_end");
  if (s.ramp_end > max_iters) raise("BadSchedule", "ramp_end must not exceed max_iters");
}

namespace {

struct TokenizedTask {
  std::vector<std::vector<int>> lines;
};

std::vector<TokenizedTask> tokenize_tasks(const Vocab& vocab, const std::vector<TaskDataset>& ts) {
  std::vector<TokenizedTask> out(ts.size());
  for (size_t i = 0; i < ts.size(); ++i) {
    if (ts[i].train.empty() || ts[i].test.empty()) raise("EmptyDataset", ts[i].name);
    out[i].lines.reserve(ts[i].train.size());
    for (const auto& line : ts[i].train) {
      try {
        out[i].lines.push_back(tokenize(line, vocab));
      } catch (const Error&) {
        raise("VocabMismatch", ts[i].name + ": " + line);
      }
    }
    for (const auto& line : ts[i].test) {
      try {
        tokenize(line, vocab);
      } catch (const Error&) {
        raise("VocabMismatch", ts[i].name + ": " + line);
      }
    }
  }
  return out;
}

// Draw order per example: optional curriculum coin, then task index, then
// line index. Fixed so that runs replay bit-for-bit.
struct ExampleSampler {
  const std::vector<TokenizedTask>* target = nullptr;
  const std::vector<TokenizedTask>* scaffold = nullptr;
  const CurriculumSchedule* schedule = nullptr;

  const std::vector<int>& draw(Rng& rng, int step) const {
    const std::vector<TokenizedTask>* pool = target;
    if (schedule) {
      const double lam = mix_lambda(*schedule, step);
      if (rng.uniform01() >= lam) pool = scaffold;
    }
    const int ti = rng.uniform_int(0, int(pool->size()) - 1);
    const auto& lines = (*pool)[ti].lines;
    return lines[rng.uniform_int(0, int(lines.size()) - 1)];
  }
};

void build_batch(const ExampleSampler& sampler, Rng& rng, int step, int batch, int context,
                 std::vector<int>& stream, std::vector<int>& ids, std::vector<int>& targets) {
  const int need = batch * context + 1;
  stream.clear();
  while (int(stream.size()) < need) {
    const auto& line = sampler.draw(rng, step);
    stream.insert(stream.end(), line.begin(), line.end());
  }
  ids.assign(stream.begin(), stream.begin() + batch * context);
  targets.resize(batch * context);
  for (int i = 0; i < batch * context; ++i) targets[i] = stream[i + 1];
}

double cosine_lr(const TrainConfig& cfg, int step) {
  const double frac = double(step) / double(cfg.max_iters);
  return cfg.lr_floor + 0.5 * (cfg.lr_peak - cfg.lr_floor) * (1.0 + std::cos(M_PI * frac));
}

struct Adam {
  Params<float> m, v;
  long long t = 0;

  void init(const ModelConfig& cfg) {
    m.allocate(cfg);
    v.allocate(cfg);
  }

  void update(Params<float>& p, Params<float>& g, const TrainConfig& cfg, double lr) {
    ++t;
    const float b1 = float(cfg.adam_beta1), b2 = float(cfg.adam_beta2);
    const float bc1 = float(1.0 - std::pow(cfg.adam_beta1, double(t)));
    const float bc2 = float(1.0 - std::pow(cfg.adam_beta2, double(t)));
    const float eps = float(cfg.adam_eps), a = float(lr);
    auto pr = p.tensor_refs();
    auto gr = g.tensor_refs();
    auto mr = m.tensor_refs();
    auto vr = v.tensor_refs();
    for (size_t i = 0; i < pr.size(); ++i) {
      Eigen::Map<Eigen::ArrayXf> ap(pr[i].data, pr[i].size);
      Eigen::Map<Eigen::ArrayXf> ag(gr[i].data, gr[i].size);
      Eigen::Map<Eigen::ArrayXf> am(mr[i].data, mr[i].size);
      Eigen::Map<Eigen::ArrayXf> av(vr[i].data, vr[i].size);
      am = b1 * am + (1 - b1) * ag;
      av = b2 * av + (1 - b2) * ag.square();
      ap -= a * (am / bc1) / ((av / bc2).sqrt() + eps);
    }
  }
};

}  // namespace

EvalResult evaluate(const Params<float>& params, const ModelConfig& cfg, const Vocab& vocab,
                    const std::vector<std::string>& lines, int n_samples, Rng& rng) {
  if (lines.empty()) raise("EmptyDataset", "evaluation set");
  const int m = int(lines.size());
  std::vector<int> order;
  if (n_samples >= m) {
    order.resize(m);
    for (int i = 0; i < m; ++i) order[i] = i;
  } else {
    std::vector<int> idx(m);
    for (int i = 0; i < m; ++i) idx[i] = i;
    for (int i = 0; i < n_samples; ++i) {
      const int j = rng.uniform_int(i, m - 1);
      std::swap(idx[i], idx[j]);
    }
    order.assign(idx.begin(), idx.begin() + n_samples);
  }

  EvalResult res;
  int correct = 0;
  double loss_sum = 0;
  long long loss_count = 0;
  FwdCache<float> cache;
  DecodeState<float> st;
  for (int li : order) {
    const std::vector<int> ids = tokenize(lines[li], vocab);
    const int n = int(ids.size());
    auto step_it = std::find(ids.begin(), ids.end(), vocab.step_id);
    auto eq_it = std::find(ids.begin(), ids.end(), vocab.equals_id);
    if (n > cfg.context || eq_it == ids.end() || eq_it + 1 == ids.end()) {
      ++res.malformed;
      continue;
    }
    // Prompt runs through the first ">", or through "=" for trace-free lines.
    const int prompt_len =
        int((step_it != ids.end() ? step_it : eq_it) - ids.begin()) + 1;
    const int ref_answer = *(eq_it + 1);

    st.reset(cfg);
    VecX<float> logits;
    for (int i = 0; i < prompt_len; ++i) logits = st.feed(params, cfg, ids[i]);
    std::vector<int> full(ids.begin(), ids.begin() + prompt_len);
    while (st.pos < cfg.context) {
      int arg = 0;
      logits.maxCoeff(&arg);
      full.push_back(arg);
      if (arg == vocab.eos_id) break;
      logits = st.feed(params, cfg, arg);
    }
    int answered = -1;
    for (size_t i = 0; i + 1 < full.size(); ++i)
      if (full[i] == vocab.equals_id) {
        answered = int(i + 1) >= prompt_len ? full[i + 1] : -1;
        break;
      }
    if (answered == ref_answer) ++correct;

    std::vector<int> input(ids.begin(), ids.end() - 1);
    std::vector<int> targets(n - 1);
    for (int i = 0; i < n - 1; ++i) targets[i] = (i + 1 >= prompt_len) ? ids[i + 1] : -1;
    const double line_loss = loss_only(params, cfg, input, targets, 1, n - 1, cache);
    const int cnt = n - prompt_len;
    loss_sum += line_loss * cnt;
    loss_count += cnt;
    ++res.evaluated;
  }
  if (res.evaluated == 0) raise("EmptyDataset", "all evaluation lines malformed");
  res.accuracy = double(correct) / double(res.evaluated);
  res.mean_loss = loss_sum / double(loss_count);
  return res;
}

RunRecord train(const ModelConfig& model_cfg, const TrainConfig& train_cfg, const Vocab& vocab,
                const std::vector<TaskDataset>& tasks, const std::vector<TaskDataset>& scaffold,
                const std::optional<CurriculumSchedule>& schedule) {
  validate_model(model_cfg);
  validate_train(train_cfg);
  if (int(vocab.size()) != model_cfg.vocab_size)
    raise("VocabMismatch", "model vocab_size does not match the vocabulary");
  if (tasks.empty()) raise("EmptyDataset", "no tasks");
  if (schedule.has_value()) {
    validate_schedule(*schedule, train_cfg.max_iters);
    if (scaffold.empty()) raise("BadSchedule", "curriculum requires a scaffold mixture");
  } else if (!scaffold.empty()) {
    raise("BadSchedule", "scaffold mixture requires a schedule");
  }

  const auto wall_start = std::chrono::steady_clock::now();
  std::vector<TokenizedTask> target_tok = tokenize_tasks(vocab, tasks);
  std::vector<TokenizedTask> scaffold_tok = tokenize_tasks(vocab, scaffold);
  ExampleSampler sampler{&target_tok, scaffold_tok.empty() ? nullptr : &scaffold_tok,
                         schedule.has_value() ? &*schedule : nullptr};

  RunRecord rec;
  rec.model = model_cfg;
  rec.train = train_cfg;
  rec.vocab_tokens = vocab.tokens;
  for (const auto& t : tasks) rec.task_names.push_back(t.name);
  for (const auto& t : scaffold) rec.task_names.push_back(t.name);
  rec.params = count_params(model_cfg);

  Rng root(train_cfg.seed);
  Rng init_rng = root.stream(0);
  Rng data_rng = root.stream(1);
  Rng probe_rng = root.stream(2);
  Rng eval_rng = root.stream(3);

  Params<float>& p = rec.weights;
  p.init(model_cfg, init_rng);
  Params<float> grads;
  grads.allocate(model_cfg);
  Adam adam;
  adam.init(model_cfg);
  FwdCache<float> cache;

  const int B = train_cfg.batch_size;
  const int L = model_cfg.context;

  // Fixed probe batches drawn once; their loss is the plateau statistic.
  std::vector<std::vector<int>> probe_ids(train_cfg.probe_batches),
      probe_targets(train_cfg.probe_batches);
  {
    std::vector<int> stream;
    for (int i = 0; i < train_cfg.probe_batches; ++i)
      build_batch(sampler, probe_rng, 0, B, L, stream, probe_ids[i], probe_targets[i]);
  }
  auto probe_loss = [&]() {
    double sum = 0;
    for (int i = 0; i < train_cfg.probe_batches; ++i)
      sum += loss_only(p, model_cfg, probe_ids[i], probe_targets[i], B, L, cache);
    return sum / train_cfg.probe_batches;
  };

  // One decoding/loss evaluation pass over every task's test lines.
  auto eval_all = [&](int n_samples, std::map<std::string, double>& acc,
                      std::map<std::string, double>& loss) {
    auto run_one = [&](const TaskDataset& t) {
      EvalResult r = evaluate(p, model_cfg, vocab, t.test, n_samples, eval_rng);
      acc[t.name] = r.accuracy;
      loss[t.name] = r.mean_loss;
    };
    for (const auto& t : tasks) run_one(t);
    for (const auto& t : scaffold) run_one(t);
  };

  std::vector<int> stream, ids, targets;
  double prev_probe = probe_loss();
  int consec = 0;
  double interval_sum = 0;
  int interval_n = 0;
  rec.stop_reason = "max_iters";

  int step = 0;
  while (step < train_cfg.max_iters) {
    build_batch(sampler, data_rng, step, B, L, stream, ids, targets);
    const double lr = cosine_lr(train_cfg, step);
    const float loss = loss_and_grads(p, model_cfg, ids, targets, B, L, grads, cache);
    adam.update(p, grads, train_cfg, lr);
    interval_sum += loss;
    ++interval_n;
    ++step;

    const bool at_eval = step % train_cfg.eval_interval == 0 || step == train_cfg.max_iters;
    if (!at_eval) continue;

    MetricRow row;
    row.step = step;
    row.train_loss = interval_sum / interval_n;
    interval_sum = 0;
    interval_n = 0;
    row.lr = lr;
    row.probe_loss = probe_loss();
    if (std::abs(row.probe_loss - prev_probe) < train_cfg.early_stop_delta)
      ++consec;
    else
      consec = 0;
    prev_probe = row.probe_loss;
    eval_all(train_cfg.eval_samples, row.acc, row.eval_loss);
    rec.history.push_back(std::move(row));

    if (train_cfg.early_stop && step >= train_cfg.early_stop_warmup &&
        consec >= train_cfg.early_stop_patience) {
      rec.stop_reason = "early_stop";
      break;
    }
  }

  rec.stopped_at = step;
  eval_all(train_cfg.final_eval_samples, rec.final_acc, rec.final_loss);
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return rec;
}

// ---- run directory persistence ----

namespace {

std::string bool_text(bool b) { return b ? "true" : "false"; }

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (size_t i = 0; i < names.size(); ++i) {
    if (i) out += ",";
    out += names[i];
  }
  return out;
}

}  // namespace

void write_run_dir(const std::string& dir, const RunRecord& record) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  if (fs::exists(root / "config.txt") || fs::exists(root / "result.txt"))
    raise("RunDirExists", dir);
  fs::create_directories(root);

  {
    std::ofstream os(root / "config.txt");
    if (!os) raise("IoError", "cannot write " + (root / "config.txt").string());
    const ModelConfig& m = record.model;
    const TrainConfig& t = record.train;
    os << "[model]\n";
    os << "n_embed = " << m.n_embed << "\n";
    os << "n_head = " << m.n_head << "\n";
    os << "variant = " << (m.variant == Variant::Recurrent ? "recurrent" : "deep") << "\n";
    os << "steps = " << m.steps << "\n";
    os << "layers = " << m.layers << "\n";
    os << "context = " << m.context << "\n";
    os << "vocab_size = " << m.vocab_size << "\n";
    os << "\n[train]\n";
    os << "batch_size = " << t.batch_size << "\n";
    os << "max_iters = " << t.max_iters << "\n";
    os << "lr_peak = " << t.lr_peak << "\n";
    os << "lr_floor = " << t.lr_floor << "\n";
    os << "adam_beta1 = " << t.adam_beta1 << "\n";
    os << "adam_beta2 = " << t.adam_beta2 << "\n";
    os << "adam_eps = " << t.adam_eps << "\n";
    os << "eval_interval = " << t.eval_interval << "\n";
    os << "eval_samples = " << t.eval_samples << "\n";
    os << "final_eval_samples = " << t.final_eval_samples << "\n";
    os << "early_stop = " << bool_text(t.early_stop) << "\n";
    os << "early_stop_delta = " << t.early_stop_delta << "\n";
    os << "early_stop_patience = " << t.early_stop_patience << "\n";
    os << "early_stop_warmup = " << t.early_stop_warmup << "\n";
    os << "probe_batches = " << t.probe_batches << "\n";
    os << "seed = " << t.seed << "\n";
    os << "\n[tasks]\n";
    os << "names = " << join_names(record.task_names) << "\n";
  }

  {
    std::ofstream os(root / "metrics.csv");
    if (!os) raise("IoError", "cannot write metrics.csv");
    os << "step,train_loss,probe_loss,lr";
    for (const auto& name : record.task_names) os << ",acc_" << name << ",evloss_" << name;
    os << "\n";
    os.precision(9);
    for (const auto& row : record.history) {
      os << row.step << "," << row.train_loss << "," << row.probe_loss << "," << row.lr;
      for (const auto& name : record.task_names)
        os << "," << row.acc.at(name) << "," << row.eval_loss.at(name);
      os << "\n";
    }
  }

  save_checkpoint((root / "checkpoint.bin").string(), record.model,
                  const_cast<RunRecord&>(record).weights);
  save_embedding((root / "embedding.txt").string(), record.vocab_tokens,
                 record.weights.tok_emb);

  {
    std::ofstream os(root / "result.txt");
    if (!os) raise("IoError", "cannot write result.txt");
    os.precision(9);
    os << "params = " << record.params << "\n";
    os << "stopped_at = " << record.stopped_at << "\n";
    os << "reason = " << record.stop_reason << "\n";
    os << "wall_seconds = " << record.wall_seconds << "\n";
    for (const auto& [name, acc] : record.final_acc) os << "acc_" << name << " = " << acc << "\n";
    for (const auto& [name, l] : record.final_loss) os << "loss_" << name << " = " << l << "\n";
  }
}

bool run_dir_complete(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  return fs::exists(root / "result.txt") && fs::exists(root / "checkpoint.bin") &&
         fs::exists(root / "embedding.txt");
}

RunSummary read_run_summary(const std::string& dir) {
  std::ifstream is(std::filesystem::path(dir) / "result.txt");
  if (!is) raise("IoError", "cannot read result.txt in " + dir);
  RunSummary s;
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    const std::string val = line.substr(eq + 3);
    if (key == "params")
      s.params = std::stoll(val);
    else if (key == "stopped_at")
      s.stopped_at = std::stoi(val);
    else if (key.rfind("acc_", 0) == 0)
      s.final_acc[key.substr(4)] = std::stod(val);
    else if (key.rfind("loss_", 0) == 0)
      s.final_loss[key.substr(5)] = std::stod(val);
  }
  return s;
}

}  // namespace listops
