// Command-line surface: dataset generation, single runs, sweeps with logistic
// fits, curriculum runs, embedding analysis, and ratio reports.
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "listops/analysis.hpp"
#include "listops/common.hpp"
#include "listops/config.hpp"
#include "listops/dataset.hpp"
#include "listops/domain.hpp"
#include "listops/perm.hpp"
#include "listops/rng.hpp"
#include "listops/sweep.hpp"
#include "listops/task.hpp"
#include "listops/train.hpp"
#include "listops/vocab.hpp"

namespace fs = std::filesystem;
using namespace listops;

namespace {

std::string resolve_out(const std::string& flag_value, const std::string& cfg_value,
                        const std::string& leaf) {
  if (!flag_value.empty()) return flag_value;
  if (!cfg_value.empty()) return cfg_value;
  if (const char* root = std::getenv("LISTOPS_OUT")) return std::string(root) + "/" + leaf;
  raise("UsageError", "no output location: pass --out or set LISTOPS_OUT");
}

ExperimentConfig load_base_config(const std::string& config_path) {
  if (config_path.empty()) return ExperimentConfig{};
  return read_config_file(config_path);
}

void apply_sets(ExperimentConfig& cfg, const std::vector<std::string>& sets) {
  for (const std::string& s : sets) apply_override(cfg, s);
}

int lines_for(const ExperimentConfig& cfg) {
  return cfg.lines > 0 ? cfg.lines : dataset_size_for(cfg.task.modulus);
}

int perm_lines_for(const ExperimentConfig& cfg) {
  return cfg.lines > 0 ? cfg.lines : 5000 * 36;
}

// One mixture's TaskSpec: the shared task shape with the mix's own op set.
TaskSpec mix_task_spec(const ExperimentConfig& cfg, const std::string& mix) {
  TaskSpec spec = cfg.task;
  spec.ops = parse_ops(mix);
  const bool wants_table =
      std::find(spec.ops.begin(), spec.ops.end(), OpKind::ShufAdd) != spec.ops.end();
  if (!wants_table) spec.shuffle_seed.reset();
  return spec;
}

perm::PermTaskSpec perm_mix_task_spec(const ExperimentConfig& cfg, const std::string& mix) {
  perm::PermTaskSpec spec;
  spec.ops = perm::parse_perm_ops(mix);
  spec.max_depth = cfg.task.max_depth;
  spec.max_args = cfg.task.max_args;
  spec.cot = cfg.task.cot;
  return spec;
}

void print_run_summary(const RunRecord& rec) {
  std::cout << "params = " << rec.params << "\n";
  std::cout << "stopped_at = " << rec.stopped_at << " (" << rec.stop_reason << ")\n";
  std::cout << "wall_seconds = " << rec.wall_seconds << "\n";
  for (const auto& [task, acc] : rec.final_acc)
    std::cout << "acc_" << task << " = " << acc << "\n";
}

void print_transition_table(const std::vector<TransitionRow>& rows) {
  std::cout << "mix,task,L,k,x0,p_star\n";
  for (const TransitionRow& r : rows)
    std::cout << r.mix << ',' << r.task << ',' << r.fit.asymptote << ',' << r.fit.steepness
              << ',' << r.fit.midpoint << ',' << r.p_star << "\n";
}

int cmd_gen(const std::string& ops, int mod, int depth, int args, bool no_cot,
            std::optional<uint64_t> shuffle_seed, int lines, uint64_t seed,
            const std::string& out) {
  TaskSpec spec;
  spec.ops = parse_ops(ops);
  spec.modulus = mod;
  spec.shuffle_seed = shuffle_seed;
  spec.max_depth = depth;
  spec.max_args = args;
  spec.cot = !no_cot;
  validate_task(spec);
  const std::string dir = resolve_out(out, "", "dataset-" + ops_name(spec.ops));
  Domain dom = make_domain(spec);
  const int count = lines > 0 ? lines : dataset_size_for(mod);
  Rng rng(seed);
  DatasetSplit split = make_dataset(dom, count, rng);
  std::string desc = "ops = " + ops_name(spec.ops) + "\nmodulus = " + std::to_string(mod) +
                     "\nlines = " + std::to_string(count) + "\nseed = " + std::to_string(seed) +
                     "\n";
  write_dataset(dir, split, desc);
  std::cout << "wrote " << dir << ": train=" << split.train.size()
            << " test=" << split.test.size() << " excluded=" << split.excluded.size() << "\n";
  return 0;
}

int cmd_perm_gen(const std::string& ops, int depth, int args, bool no_cot, int lines,
                 uint64_t seed, const std::string& out) {
  perm::PermTaskSpec spec;
  spec.ops = perm::parse_perm_ops(ops);
  spec.max_depth = depth;
  spec.max_args = args;
  spec.cot = !no_cot;
  perm::validate_perm_task(spec);
  const std::string dir = resolve_out(out, "", "permset-" + perm::perm_ops_name(spec.ops));
  Domain dom = perm::make_perm_domain(spec);
  const int count = lines > 0 ? lines : 5000 * 36;
  Rng rng(seed);
  DatasetSplit split = make_dataset(dom, count, rng);
  std::string desc = "ops = " + perm::perm_ops_name(spec.ops) + "\ngroup = S3xS3\nlines = " +
                     std::to_string(count) + "\nseed = " + std::to_string(seed) + "\n";
  write_dataset(dir, split, desc);
  std::cout << "wrote " << dir << ": train=" << split.train.size()
            << " test=" << split.test.size() << " excluded=" << split.excluded.size() << "\n";
  return 0;
}

int cmd_train(ExperimentConfig cfg, bool use_perm, const std::string& perm_ops,
              const std::string& out_flag) {
  MixData mix;
  if (use_perm) {
    perm::PermTaskSpec spec = perm_mix_task_spec(cfg, perm_ops);
    mix = build_perm_mix(spec, perm_lines_for(cfg), cfg.data_seed);
  } else {
    mix = build_mix(cfg.task, lines_for(cfg), cfg.data_seed);
  }
  cfg.model.vocab_size = mix.vocab.size();
  const std::string dir = resolve_out(out_flag, cfg.out_dir, "run-" + mix.name);
  RunRecord rec = train(cfg.model, cfg.train, mix.vocab, mix.tasks);
  write_run_dir(dir, rec);
  std::cout << "run " << dir << "\n";
  print_run_summary(rec);
  return 0;
}

int cmd_sweep(ExperimentConfig cfg, bool use_perm, const std::string& out_flag, bool no_fit,
              int jobs) {
  if (jobs > 1) std::cerr << "[sweep] --jobs " << jobs << " requested; running sequentially\n";
  if (cfg.mixes.empty()) raise("UsageError", "no mixtures: pass --mixes or set run.mixes");
  if (cfg.dims.empty()) raise("UsageError", "no dims: pass --dims or set run.dims");
  if (cfg.seeds.empty()) raise("UsageError", "no seeds: pass --seeds or set run.seeds");
  const std::string root = resolve_out(out_flag, cfg.out_dir, "sweep");

  std::vector<MixData> mixes;
  for (const std::string& name : cfg.mixes) {
    if (use_perm)
      mixes.push_back(build_perm_mix(perm_mix_task_spec(cfg, name),
                                     perm_lines_for(cfg), cfg.data_seed));
    else
      mixes.push_back(build_mix(mix_task_spec(cfg, name), lines_for(cfg), cfg.data_seed));
  }

  fs::create_directories(root);
  if (!fs::exists(fs::path(root) / "experiment.cfg")) {
    cfg.out_dir = root;
    write_config_file((fs::path(root) / "experiment.cfg").string(), cfg);
  }

  GridOutcome grid = run_grid(mixes, cfg.dims, cfg.seeds, cfg.model, cfg.train, root, &std::cerr);
  for (const std::string& f : grid.failures) std::cerr << "[sweep] failed cell: " << f << "\n";

  std::vector<std::string> fit_failures;
  if (!no_fit) {
    std::vector<ManifestRow> rows = read_manifest((fs::path(root) / "sweep_manifest.csv").string());
    std::vector<TransitionRow> fits = fit_manifest_resilient(rows, &fit_failures);
    write_transitions((fs::path(root) / "transitions.csv").string(), fits);
    print_transition_table(fits);
    for (const std::string& f : fit_failures) std::cerr << "[sweep] fit failed: " << f << "\n";
  }
  return grid.failures.empty() && fit_failures.empty() ? 0 : 1;
}

int cmd_curriculum(ExperimentConfig cfg, const std::string& scaffold_flag,
                   const std::string& out_flag) {
  if (!scaffold_flag.empty()) cfg.scaffold_ops = parse_ops(scaffold_flag);
  if (cfg.scaffold_ops.empty())
    raise("UsageError", "no scaffold mixture: pass --scaffold or set curriculum.scaffold");
  if (!cfg.schedule) cfg.schedule = CurriculumSchedule{};
  validate_task(cfg.task);

  CurriculumData cur =
      build_curriculum_mix(cfg.task, cfg.scaffold_ops, lines_for(cfg), cfg.data_seed);
  cfg.model.vocab_size = cur.vocab.size();
  const std::string dir =
      resolve_out(out_flag, cfg.out_dir, "curriculum-" + ops_name(cfg.task.ops));
  RunRecord rec = train(cfg.model, cfg.train, cur.vocab, cur.target, cur.scaffold, cfg.schedule);
  write_run_dir(dir, rec);
  std::cout << "run " << dir << "\n";
  print_run_summary(rec);
  return 0;
}

int cmd_fit(const std::string& manifest, std::string out, const std::string& mix_filter) {
  std::vector<ManifestRow> rows = read_manifest(manifest);
  if (!mix_filter.empty()) {
    std::erase_if(rows, [&](const ManifestRow& r) { return r.mix != mix_filter; });
    if (rows.empty()) raise("UsageError", "mix " + mix_filter + " not present in " + manifest);
  }
  std::vector<std::string> failures;
  std::vector<TransitionRow> fits = fit_manifest_resilient(rows, &failures);
  if (out.empty()) out = (fs::path(manifest).parent_path() / "transitions.csv").string();
  write_transitions(out, fits);
  print_transition_table(fits);
  for (const std::string& f : failures) std::cerr << "fit failed: " << f << "\n";
  return failures.empty() ? 0 : 1;
}

int cmd_analyze_similarity(const std::string& root, const std::string& mix,
                           std::string task, double threshold, int mod, int k,
                           const std::string& out_flag, int null_trials, uint64_t null_seed) {
  if (task.empty()) task = mix;
  const fs::path mix_dir = fs::path(root) / mix;
  if (!fs::is_directory(mix_dir)) raise("UsageError", "no mix directory " + mix_dir.string());
  std::vector<RunEmbedding> runs;
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(mix_dir))
    if (entry.is_directory() && run_dir_complete(entry.path().string()))
      dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  for (const fs::path& d : dirs) runs.push_back(load_run_embedding(d.string()));
  if (runs.empty()) raise("NoQualifyingRuns", "no complete runs under " + mix_dir.string());

  SimMatrix avg = average_sims(runs, task, threshold);
  PcaResult pca = pca_numbers(avg, mod, k);

  const std::string out =
      out_flag.empty() ? (fs::path(root) / "analysis" / mix).string() : out_flag;
  fs::create_directories(out);
  write_pca_csv((fs::path(out) / "pca.csv").string(), pca, mod);

  std::vector<SeparationReport> reports;
  std::cout << "mix=" << mix << " task=" << task << " runs_loaded=" << runs.size()
            << " rank=" << pca.rank << (pca.rank_deficient ? " (rank deficient)" : "") << "\n";
  std::cout << "d,score_avg,null_mean\n";
  for (int d : candidate_divisors(mod)) {
    SeparationReport rep = separation_score(pca.coords, mod, d);
    const double null_mean = separation_null_mean(mod, d, k, null_trials, null_seed);
    std::cout << d << ',' << rep.averaged << ',' << null_mean << "\n";
    reports.push_back(std::move(rep));
  }
  write_separation_csv((fs::path(out) / "separation.csv").string(), mix, mod, reports);

  std::vector<double> rho = ordering_diagnostic(pca.coords);
  std::cout << "ordering";
  for (double r : rho) std::cout << ' ' << r;
  std::cout << "\n";
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_analyze_normratio(const std::string& run_a, const std::string& run_b,
                          const std::string& lines_file, int max_lines,
                          const std::string& out_flag) {
  ModelConfig cfg_a, cfg_b;
  Params<float> params_a, params_b;
  load_checkpoint((fs::path(run_a) / "checkpoint.bin").string(), cfg_a, params_a);
  load_checkpoint((fs::path(run_b) / "checkpoint.bin").string(), cfg_b, params_b);
  std::vector<std::string> tokens_a, tokens_b;
  load_embedding((fs::path(run_a) / "embedding.txt").string(), &tokens_a);
  load_embedding((fs::path(run_b) / "embedding.txt").string(), &tokens_b);
  auto vocab_from = [](const std::vector<std::string>& tokens) {
    Vocab v;
    v.tokens = tokens;
    for (size_t i = 0; i < tokens.size(); ++i) v.id_of[tokens[i]] = int(i);
    return v;
  };
  Vocab vocab_a = vocab_from(tokens_a);
  Vocab vocab_b = vocab_from(tokens_b);
  std::vector<std::string> lines = read_lines(lines_file);
  if (max_lines > 0 && int(lines.size()) > max_lines) lines.resize(size_t(max_lines));
  NormRatioComparison cmp =
      compare_norm_ratios(params_a, cfg_a, vocab_a, params_b, cfg_b, vocab_b, lines);
  const std::string out = out_flag.empty() ? "normratio.csv" : out_flag;
  write_normratio_csv(out, cmp);
  std::cout << "lines_used = " << cmp.lines_used << "\n";
  std::cout << "attn: d=" << cmp.attn.cohen_d << " ks=" << cmp.attn.ks << "\n";
  std::cout << "ffwd: d=" << cmp.ffwd.cohen_d << " ks=" << cmp.ffwd.ks << "\n";
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_report(const std::vector<std::string>& files) {
  std::vector<TransitionRow> rows;
  for (const std::string& f : files) {
    std::vector<TransitionRow> part = read_transitions(f);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  std::cout << "task,pure_mix,joint_mix,p_pure,p_joint,ratio\n";
  for (const TransitionRow& pure : rows) {
    if (pure.mix != pure.task) continue;
    for (const TransitionRow& joint : rows) {
      if (joint.mix == joint.task || joint.task != pure.task) continue;
      std::cout << pure.task << ',' << pure.mix << ',' << joint.mix << ',' << pure.p_star << ','
                << joint.p_star << ',' << pure.p_star / joint.p_star << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ListOps transition experiments"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate an arithmetic dataset");
  std::string gen_ops, gen_out;
  int gen_mod = 10, gen_depth = 2, gen_args = 3, gen_lines = 0;
  uint64_t gen_seed = 1;
  bool gen_no_cot = false;
  std::optional<uint64_t> gen_shuffle;
  gen->add_option("--ops", gen_ops, "Operations, e.g. add or max+med+add")->required();
  gen->add_option("--mod", gen_mod, "Modulus");
  gen->add_option("--depth", gen_depth, "Maximum nesting depth");
  gen->add_option("--args", gen_args, "Maximum operands per node");
  gen->add_flag("--no-cot", gen_no_cot, "Render answers without reasoning steps");
  gen->add_option("--shuffle-seed", gen_shuffle, "Shuffled-table seed (shuf_add only)");
  gen->add_option("--lines", gen_lines, "Generation attempts (0 = 5000 * modulus)");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output directory");

  // perm-gen
  auto* pgen = app.add_subcommand("perm-gen", "Generate a permutation-group dataset");
  std::string pgen_ops = "OP", pgen_out;
  int pgen_depth = 2, pgen_args = 3, pgen_lines = 0;
  uint64_t pgen_seed = 1;
  bool pgen_no_cot = false;
  pgen->add_option("--ops", pgen_ops, "Operations, e.g. OP or OP+OP_TOP+OP_BOTTOM");
  pgen->add_option("--depth", pgen_depth, "Maximum nesting depth");
  pgen->add_option("--args", pgen_args, "Maximum operands per node");
  pgen->add_flag("--no-cot", pgen_no_cot, "Render answers without reasoning steps");
  pgen->add_option("--lines", pgen_lines, "Generation attempts (0 = 180000)");
  pgen->add_option("--seed", pgen_seed, "Generator seed");
  pgen->add_option("--out", pgen_out, "Output directory");

  // shared experiment flags
  struct ExpFlags {
    std::string config, out;
    std::vector<std::string> sets;
    std::optional<std::string> ops;
    std::optional<int> mod, dim, iters, lines;
    std::optional<uint64_t> seed, data_seed;
  };
  auto add_exp_flags = [](CLI::App* sub, ExpFlags& f) {
    sub->add_option("--config", f.config, "Experiment config file");
    sub->add_option("--set", f.sets, "Override, section.key=value")->take_all();
    sub->add_option("--ops", f.ops, "Task operations");
    sub->add_option("--mod", f.mod, "Modulus");
    sub->add_option("--dim", f.dim, "Embedding dimension");
    sub->add_option("--iters", f.iters, "Training iterations");
    sub->add_option("--seed", f.seed, "Training seed");
    sub->add_option("--lines", f.lines, "Generation attempts per task (0 = auto)");
    sub->add_option("--data-seed", f.data_seed, "Dataset generator seed");
    sub->add_option("--out", f.out, "Output location");
  };
  auto resolve_cfg = [](const ExpFlags& f, bool use_perm) {
    ExperimentConfig cfg = load_base_config(f.config);
    if (f.ops && !use_perm) cfg.task.ops = parse_ops(*f.ops);
    if (f.mod) cfg.task.modulus = *f.mod;
    if (f.dim) cfg.model.n_embed = *f.dim;
    if (f.iters) cfg.train.max_iters = *f.iters;
    if (f.seed) cfg.train.seed = *f.seed;
    if (f.lines) cfg.lines = *f.lines;
    if (f.data_seed) cfg.data_seed = *f.data_seed;
    return cfg;
  };

  // train
  auto* train_cmd = app.add_subcommand("train", "Train one model on a task mixture");
  ExpFlags train_f;
  bool train_perm = false;
  add_exp_flags(train_cmd, train_f);
  train_cmd->add_flag("--perm", train_perm, "Permutation-group tasks");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Grid over mixes, dims, seeds, then fit");
  ExpFlags sweep_f;
  bool sweep_perm = false, sweep_no_fit = false;
  int sweep_jobs = 1;
  std::vector<std::string> sweep_mixes;
  std::vector<int> sweep_dims;
  std::vector<uint64_t> sweep_seeds;
  add_exp_flags(sweep_cmd, sweep_f);
  sweep_cmd->add_option("--mixes", sweep_mixes, "Task mixtures, e.g. add prod add+prod");
  sweep_cmd->add_option("--dims", sweep_dims, "Embedding dimensions");
  sweep_cmd->add_option("--seeds", sweep_seeds, "Training seeds");
  sweep_cmd->add_flag("--perm", sweep_perm, "Permutation-group tasks");
  sweep_cmd->add_flag("--no-fit", sweep_no_fit, "Skip logistic fits");
  sweep_cmd->add_option("--jobs", sweep_jobs, "Accepted for compatibility; runs sequentially");

  // curriculum
  auto* cur_cmd = app.add_subcommand("curriculum", "Scaffold-to-target scheduled run");
  ExpFlags cur_f;
  std::string cur_scaffold;
  add_exp_flags(cur_cmd, cur_f);
  cur_cmd->add_option("--scaffold", cur_scaffold, "Scaffold operations, e.g. add+prod");

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Fit logistic transitions from a sweep manifest");
  std::string fit_manifest_path, fit_out, fit_mix;
  fit_cmd->add_option("--manifest", fit_manifest_path, "sweep_manifest.csv path")->required();
  fit_cmd->add_option("--out", fit_out, "transitions.csv path");
  fit_cmd->add_option("--mix", fit_mix, "Restrict to one mixture");

  // analyze
  auto* an_cmd = app.add_subcommand("analyze", "Embedding similarity, PCA, separation");
  std::string an_root, an_mix, an_task, an_out, an_norm_a, an_norm_b, an_lines_file;
  double an_threshold = 0.9;
  int an_mod = 0, an_k = 5, an_null_trials = 200, an_max_lines = 200;
  uint64_t an_null_seed = 7;
  an_cmd->add_option("--root", an_root, "Sweep root containing <mix>/d<dim>_s<seed> runs");
  an_cmd->add_option("--mix", an_mix, "Mixture directory name");
  an_cmd->add_option("--task", an_task, "Accuracy-filter task (default: the mix name)");
  an_cmd->add_option("--threshold", an_threshold, "Qualifying accuracy threshold");
  an_cmd->add_option("--mod", an_mod, "Modulus (number-token count)");
  an_cmd->add_option("--components", an_k, "Principal components");
  an_cmd->add_option("--null-trials", an_null_trials, "Monte-Carlo null trials");
  an_cmd->add_option("--null-seed", an_null_seed, "Monte-Carlo null seed");
  an_cmd->add_option("--norm-a", an_norm_a, "Run directory A for norm-ratio comparison");
  an_cmd->add_option("--norm-b", an_norm_b, "Run directory B for norm-ratio comparison");
  an_cmd->add_option("--eval-lines", an_lines_file, "Eval lines file for norm ratios");
  an_cmd->add_option("--max-lines", an_max_lines, "Cap on norm-ratio eval lines");
  an_cmd->add_option("--out", an_out, "Output location");

  // report
  auto* rep_cmd = app.add_subcommand("report", "Pure-vs-joint transition ratios");
  std::vector<std::string> rep_files;
  rep_cmd->add_option("transitions", rep_files, "transitions.csv files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gen)
      return cmd_gen(gen_ops, gen_mod, gen_depth, gen_args, gen_no_cot, gen_shuffle, gen_lines,
                     gen_seed, gen_out);
    if (*pgen)
      return cmd_perm_gen(pgen_ops, pgen_depth, pgen_args, pgen_no_cot, pgen_lines, pgen_seed,
                          pgen_out);
    if (*train_cmd) {
      ExperimentConfig cfg = resolve_cfg(train_f, train_perm);
      apply_sets(cfg, train_f.sets);
      return cmd_train(cfg, train_perm, train_perm ? train_f.ops.value_or("OP") : "",
                       train_f.out);
    }
    if (*sweep_cmd) {
      ExperimentConfig cfg = resolve_cfg(sweep_f, sweep_perm);
      if (!sweep_mixes.empty()) cfg.mixes = sweep_mixes;
      if (!sweep_dims.empty()) cfg.dims = sweep_dims;
      if (!sweep_seeds.empty()) cfg.seeds = sweep_seeds;
      apply_sets(cfg, sweep_f.sets);
      return cmd_sweep(cfg, sweep_perm, sweep_f.out, sweep_no_fit, sweep_jobs);
    }
    if (*cur_cmd) {
      ExperimentConfig cfg = resolve_cfg(cur_f, false);
      apply_sets(cfg, cur_f.sets);
      return cmd_curriculum(cfg, cur_scaffold, cur_f.out);
    }
    if (*fit_cmd) return cmd_fit(fit_manifest_path, fit_out, fit_mix);
    if (*an_cmd) {
      if (!an_norm_a.empty() || !an_norm_b.empty()) {
        if (an_norm_a.empty() || an_norm_b.empty() || an_lines_file.empty())
          raise("UsageError", "norm-ratio mode needs --norm-a, --norm-b and --eval-lines");
        return cmd_analyze_normratio(an_norm_a, an_norm_b, an_lines_file, an_max_lines, an_out);
      }
      if (an_root.empty() || an_mix.empty() || an_mod == 0)
        raise("UsageError", "similarity mode needs --root, --mix and --mod");
      return cmd_analyze_similarity(an_root, an_mix, an_task, an_threshold, an_mod, an_k, an_out,
                                    an_null_trials, an_null_seed);
    }
    if (*rep_cmd) return cmd_report(rep_files);
  } catch (const Error& err) {
    std::cerr << err.what() << "\n";
    return err.kind() == "UsageError" ? 2 : 1;
  }
  return 0;
}
