// Experiment campaign: trains the evidence grids behind the transition-ratio,
// shuffled-table, permutation-group, curriculum and embedding claims, in an
// order that keeps partial results useful. Every grid cell is cached by the
// sweep layer, so the campaign can be stopped and relaunched; fits are
// rewritten after every dimension column completes.
//
//   campaign [out_root] [max_iters]
//
// Phases (priority order):
//   1 mod20   mixes add, prod, add+prod, add+nadd
//   2 perm    mixes OP and OP+OP_TOP+OP_BOTTOM
//   3 cur     one scheduled add+prod -> add run below the pure-add transition
//   4 mod26   mixes max+med+add and max+med+shuf_add (accuracy table)
//   5 mod10   mixes max, med, add over the full dimension ladder
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "listops/common.hpp"
#include "listops/dataset.hpp"
#include "listops/sweep.hpp"
#include "listops/task.hpp"
#include "listops/train.hpp"

using namespace listops;
namespace fs = std::filesystem;

namespace {

int g_max_iters = 5000;

TrainConfig campaign_train() {
  TrainConfig t;
  t.max_iters = g_max_iters;
  return t;
}

void refit(const std::string& root) {
  const std::string manifest = root + "/sweep_manifest.csv";
  if (!fs::exists(manifest)) return;
  std::vector<std::string> failures;
  std::vector<TransitionRow> fits = fit_manifest_resilient(read_manifest(manifest), &failures);
  write_transitions(root + "/transitions.csv", fits);
  for (const TransitionRow& r : fits)
    std::cout << "[fit] " << r.mix << "/" << r.task << " p*=" << r.p_star
              << " L=" << r.fit.asymptote << "\n";
  for (const std::string& f : failures) std::cout << "[fit] skipped " << f << "\n";
  std::cout.flush();
}

// One dimension column at a time so an interrupted phase still holds every
// mix and seed for the dims it finished.
void grid_by_dim(const std::vector<MixData>& mixes, const std::vector<int>& dims,
                 const std::string& root) {
  for (int d : dims) {
    run_grid(mixes, {d}, {1, 2, 3}, ModelConfig{}, campaign_train(), root, &std::cout);
    refit(root);
  }
}

void phase_mod20(const std::string& root) {
  std::vector<MixData> mixes;
  for (const char* name : {"add", "prod", "add+prod", "add+nadd"}) {
    TaskSpec spec;
    spec.ops = parse_ops(name);
    spec.modulus = 20;
    mixes.push_back(build_mix(spec, dataset_size_for(20), 1));
    std::cout << "[data] mod20 " << mixes.back().name << " ready\n";
  }
  grid_by_dim(mixes, {8, 16, 24, 32, 48, 64}, root);
}

void phase_perm(const std::string& root) {
  std::vector<MixData> mixes;
  for (const char* name : {"OP", "OP+OP_TOP+OP_BOTTOM"}) {
    perm::PermTaskSpec spec;
    spec.ops = perm::parse_perm_ops(name);
    mixes.push_back(build_perm_mix(spec, 5000 * 36, 1));
    std::cout << "[data] perm " << mixes.back().name << " ready\n";
  }
  grid_by_dim(mixes, {2, 3, 4, 6, 8, 12, 16}, root);
}

// Largest size whose seed-mean pure-add accuracy stays under 30%: the most
// capable model that still fails the target task on its own.
int pick_curriculum_dim(const std::string& mod20_root) {
  std::map<int, std::pair<double, int>> by_dim;
  for (const ManifestRow& r : read_manifest(mod20_root + "/sweep_manifest.csv")) {
    if (r.mix != "add") continue;
    by_dim[r.n_embed].first += r.acc.at("add");
    by_dim[r.n_embed].second += 1;
  }
  if (by_dim.empty()) raise("EmptyGrid", "no pure-add rows under " + mod20_root);
  int best = -1;
  for (const auto& [dim, sum_count] : by_dim) {
    const double mean = sum_count.first / sum_count.second;
    std::cout << "[cur] pure-add d=" << dim << " mean acc=" << mean << "\n";
    if (mean < 0.30 && dim > best) best = dim;
  }
  if (best < 0) {
    best = by_dim.begin()->first;
    std::cout << "[cur] no size stayed under 30%, falling back to d=" << best << "\n";
  }
  return best;
}

void phase_curriculum(const std::string& mod20_root, const std::string& root) {
  const int dim = pick_curriculum_dim(mod20_root);
  const std::string dir = root + "/d" + std::to_string(dim) + "_s1";
  if (run_dir_complete(dir)) {
    std::cout << "[cur] " << dir << " cached\n";
    return;
  }
  if (fs::exists(dir)) fs::remove_all(dir);

  TaskSpec target;
  target.ops = {OpKind::Add};
  target.modulus = 20;
  CurriculumData cur =
      build_curriculum_mix(target, {OpKind::Add, OpKind::Prod}, dataset_size_for(20), 1);

  ModelConfig model;
  model.n_embed = dim;
  model.vocab_size = cur.vocab.size();
  TrainConfig tc;  // full default budget so the schedule has room
  tc.early_stop = false;  // the probe statistic tracks the scaffold phase
  CurriculumSchedule sched;
  RunRecord rec = train(model, tc, cur.vocab, cur.target, cur.scaffold, sched);
  write_run_dir(dir, rec);
  std::cout << "[cur] d=" << dim << " stop=" << rec.stopped_at << " ("
            << rec.wall_seconds << "s)";
  for (const auto& [t, a] : rec.final_acc) std::cout << " acc_" << t << "=" << a;
  std::cout << "\n";
  std::cout.flush();
}

void phase_mod26(const std::string& root) {
  std::vector<MixData> mixes;
  for (const char* name : {"max+med+add", "max+med+shuf_add"}) {
    TaskSpec spec;
    spec.ops = parse_ops(name);
    spec.modulus = 26;
    if (std::find(spec.ops.begin(), spec.ops.end(), OpKind::ShufAdd) != spec.ops.end())
      spec.shuffle_seed = 1;
    mixes.push_back(build_mix(spec, dataset_size_for(26), 1));
    std::cout << "[data] mod26 " << mixes.back().name << " ready\n";
  }
  grid_by_dim(mixes, {16, 24, 32, 48, 64}, root);
}

void phase_mod10(const std::string& root) {
  std::vector<MixData> mixes;
  for (const char* name : {"max", "med", "add"}) {
    TaskSpec spec;
    spec.ops = parse_ops(name);
    spec.modulus = 10;
    mixes.push_back(build_mix(spec, dataset_size_for(10), 1));
    std::cout << "[data] mod10 " << mixes.back().name << " ready\n";
  }
  grid_by_dim(mixes, {8, 16, 24, 32, 48, 64, 96, 128}, root);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string root = argc > 1 ? argv[1] : "runs/campaign";
  if (argc > 2) g_max_iters = std::stoi(argv[2]);
  std::cout << "[campaign] root=" << root << " max_iters=" << g_max_iters << "\n";

  struct Phase {
    const char* name;
    void (*fn)(const std::string&);
    std::string dir;
  };
  const std::string mod20 = root + "/mod20";
  std::vector<Phase> phases = {
      {"mod20", &phase_mod20, mod20},
      {"perm", &phase_perm, root + "/perm"},
      {"mod26", &phase_mod26, root + "/mod26"},
      {"mod10", &phase_mod10, root + "/mod10"},
  };

  int failures = 0;
  for (size_t i = 0; i < phases.size(); ++i) {
    const Phase& p = phases[i];
    std::cout << "[campaign] phase " << p.name << " start\n";
    try {
      p.fn(p.dir);
      // The curriculum needs the mod20 fits, then the cheap grids resume.
      if (std::string(p.name) == "perm") {
        std::cout << "[campaign] phase curriculum start\n";
        phase_curriculum(mod20, root + "/curriculum");
        std::cout << "[campaign] phase curriculum done\n";
      }
    } catch (const Error& e) {
      ++failures;
      std::cout << "[campaign] phase " << p.name << " FAILED: " << e.what() << "\n";
    }
    std::cout << "[campaign] phase " << p.name << " done\n";
    std::cout.flush();
  }
  std::cout << "[campaign] finished, failed phases: " << failures << "\n";
  return failures == 0 ? 0 : 1;
}
