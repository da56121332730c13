#include "listops/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "listops/common.hpp"
#include "listops/dataset.hpp"
#include "listops/domain.hpp"
#include "listops/model.hpp"
#include "listops/vocab.hpp"

namespace fs = std::filesystem;

namespace listops {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// Mean accuracy per distinct param count, x = ln(params), sorted by x.
struct MeanSeries {
  std::vector<double> x;
  std::vector<double> y;
};

MeanSeries seed_means(const std::vector<CurvePoint>& points) {
  std::map<double, std::pair<double, int>> acc;
  for (const CurvePoint& p : points) {
    auto& slot = acc[p.params];
    slot.first += p.accuracy;
    slot.second += 1;
  }
  MeanSeries s;
  for (const auto& [params, sum_n] : acc) {
    s.x.push_back(std::log(params));
    s.y.push_back(sum_n.first / sum_n.second);
  }
  return s;
}

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// Closed-form asymptote for fixed (steepness, midpoint), clamped to (0, 1],
// and the resulting sum of squared residuals.
std::pair<double, double> best_asymptote(const MeanSeries& s, double k, double x0) {
  double num = 0;
  double den = 0;
  for (size_t i = 0; i < s.x.size(); ++i) {
    const double sig = sigmoid(k * (s.x[i] - x0));
    num += s.y[i] * sig;
    den += sig * sig;
  }
  if (!(den > 0) || !std::isfinite(den)) return {1e-9, std::numeric_limits<double>::infinity()};
  const double L = std::clamp(num / den, 1e-9, 1.0);
  double sse = 0;
  for (size_t i = 0; i < s.x.size(); ++i) {
    const double r = s.y[i] - L * sigmoid(k * (s.x[i] - x0));
    sse += r * r;
  }
  return {L, sse};
}

}  // namespace

double transition_point(const LogisticFit& fit) {
  return std::exp(fit.midpoint + std::log(4.0) / fit.steepness);
}

LogisticFit fit_logistic(const std::vector<CurvePoint>& points) {
  MeanSeries s = seed_means(points);
  if (s.x.size() < 4) raise("InsufficientPoints", "need >=4 distinct param counts, got " +
                                                      std::to_string(s.x.size()));
  bool all_equal = true;
  for (double y : s.y)
    if (y != s.y[0]) all_equal = false;
  if (all_equal) raise("DegenerateCurve", "all mean accuracies equal " + fmt_double(s.y[0]));

  const double x_lo = s.x.front() - 2.0;
  const double x_hi = s.x.back() + 2.0;
  double best_k = 1.0, best_x0 = s.x.front(), best_sse = std::numeric_limits<double>::infinity();
  for (int ki = 0; ki <= 60; ++ki) {
    const double k = 0.05 * std::pow(100.0 / 0.05, ki / 60.0);
    for (int xi = 0; xi <= 200; ++xi) {
      const double x0 = x_lo + (x_hi - x_lo) * xi / 200.0;
      const double sse = best_asymptote(s, k, x0).second;
      if (sse < best_sse) {
        best_sse = sse;
        best_k = k;
        best_x0 = x0;
      }
    }
  }

  // Coordinate refinement with shrinking radii; a move is taken only when it
  // lowers the objective by a meaningful margin, so the objective is monotone
  // and the loop cannot ride sub-ulp rounding noise. Steepness is capped:
  // beyond the cap the curve is an exact step at every sample anyway.
  const double k_cap = 1e4;
  auto improves = [&](double sse, double best) {
    return sse < best - std::max(1e-18, 1e-12 * best);
  };
  double rk = 0.15;  // multiplicative radius on steepness
  double rx = (x_hi - x_lo) / 200.0;
  long moves = 0;
  const long move_budget = 100000;
  while ((rk > 1e-12 || rx > 1e-12) && moves < move_budget) {
    bool moved = true;
    while (moved && moves < move_budget) {
      moved = false;
      const double cand_k[] = {best_k * std::exp(rk), best_k * std::exp(-rk)};
      for (double k : cand_k) {
        if (k > k_cap || k < 1e-4) continue;
        const double sse = best_asymptote(s, k, best_x0).second;
        if (improves(sse, best_sse)) {
          best_sse = sse;
          best_k = k;
          moved = true;
          ++moves;
        }
      }
      const double cand_x[] = {best_x0 + rx, best_x0 - rx};
      for (double x0 : cand_x) {
        const double sse = best_asymptote(s, best_k, x0).second;
        if (improves(sse, best_sse)) {
          best_sse = sse;
          best_x0 = x0;
          moved = true;
          ++moves;
        }
      }
    }
    rk *= 0.5;
    rx *= 0.5;
  }

  LogisticFit fit;
  fit.asymptote = best_asymptote(s, best_k, best_x0).first;
  fit.steepness = best_k;
  fit.midpoint = best_x0;
  return fit;
}

double transition_ratio(const TransitionCurve& pure, const TransitionCurve& joint) {
  if (!pure.fit) raise("MissingFit", "pure curve has no fit");
  if (!joint.fit) raise("MissingFit", "joint curve has no fit");
  return transition_point(*pure.fit) / transition_point(*joint.fit);
}

MixData build_mix(const TaskSpec& joint_spec, int lines_per_task, uint64_t data_seed) {
  TaskSpec joint = joint_spec;
  validate_task(joint);
  MixData mix;
  mix.name = ops_name(joint.ops);
  mix.vocab = make_vocab(make_domain(joint));
  Rng root(data_seed);
  for (size_t i = 0; i < joint.ops.size(); ++i) {
    TaskSpec single = joint;
    single.ops = {joint.ops[i]};
    if (single.ops[0] != OpKind::ShufAdd) single.shuffle_seed.reset();
    validate_task(single);
    Domain dom = make_domain(single);
    Rng stream = root.stream(i);
    DatasetSplit split = make_dataset(dom, lines_per_task, stream);
    TaskDataset td;
    td.name = ops_name(single.ops);
    td.train = std::move(split.train);
    td.test = std::move(split.test);
    mix.tasks.push_back(std::move(td));
  }
  return mix;
}

MixData build_perm_mix(const perm::PermTaskSpec& joint_spec, int lines_per_task,
                       uint64_t data_seed) {
  perm::PermTaskSpec joint = joint_spec;
  perm::validate_perm_task(joint);
  MixData mix;
  mix.name = perm::perm_ops_name(joint.ops);
  mix.vocab = make_vocab(perm::make_perm_domain(joint));
  Rng root(data_seed);
  for (size_t i = 0; i < joint.ops.size(); ++i) {
    perm::PermTaskSpec single = joint;
    single.ops = {joint.ops[i]};
    perm::validate_perm_task(single);
    Domain dom = perm::make_perm_domain(single);
    Rng stream = root.stream(i);
    DatasetSplit split = make_dataset(dom, lines_per_task, stream);
    TaskDataset td;
    td.name = perm::perm_ops_name(single.ops);
    td.train = std::move(split.train);
    td.test = std::move(split.test);
    mix.tasks.push_back(std::move(td));
  }
  return mix;
}

void append_manifest_row(const std::string& path, const ManifestRow& row,
                         const std::vector<std::string>& acc_columns) {
  for (const auto& [task, a] : row.acc) {
    (void)a;
    if (std::find(acc_columns.begin(), acc_columns.end(), task) == acc_columns.end())
      raise("ManifestMismatch", "task " + task + " not in manifest columns");
  }
  std::string header = "mix,n_embed,params,seed";
  for (const std::string& t : acc_columns) header += ",acc_" + t;
  header += ",loss";

  const bool fresh = !fs::exists(path);
  if (!fresh) {
    std::ifstream in(path);
    std::string existing;
    std::getline(in, existing);
    if (existing != header)
      raise("ManifestMismatch", "existing header of " + path + " does not match: " + existing);
  }
  std::ofstream out(path, std::ios::app);
  if (!out) raise("IoError", "cannot open " + path);
  if (fresh) out << header << "\n";
  out << row.mix << ',' << row.n_embed << ',' << row.params << ',' << row.seed;
  for (const std::string& t : acc_columns) {
    out << ',';
    auto it = row.acc.find(t);
    if (it != row.acc.end()) out << fmt_double(it->second);
  }
  out << ',' << fmt_double(row.loss) << "\n";
}

std::vector<ManifestRow> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise("IoError", "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) raise("IoError", "empty manifest " + path);
  std::vector<std::string> cols = split_csv(line);
  if (cols.size() < 5 || cols[0] != "mix" || cols.back() != "loss")
    raise("IoError", "bad manifest header: " + line);
  std::vector<std::string> acc_cols;
  for (size_t i = 4; i + 1 < cols.size(); ++i) {
    if (cols[i].rfind("acc_", 0) != 0) raise("IoError", "bad manifest column: " + cols[i]);
    acc_cols.push_back(cols[i].substr(4));
  }
  std::vector<ManifestRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv(line);
    if (f.size() != cols.size()) raise("IoError", "bad manifest row: " + line);
    ManifestRow r;
    r.mix = f[0];
    r.n_embed = std::stoi(f[1]);
    r.params = std::stoll(f[2]);
    r.seed = std::stoull(f[3]);
    for (size_t i = 0; i < acc_cols.size(); ++i)
      if (!f[4 + i].empty()) r.acc[acc_cols[i]] = std::stod(f[4 + i]);
    r.loss = std::stod(f.back());
    rows.push_back(std::move(r));
  }
  return rows;
}

GridOutcome run_grid(const std::vector<MixData>& mixes, const std::vector<int>& dims,
                     const std::vector<uint64_t>& seeds, const ModelConfig& base_model,
                     const TrainConfig& base_train, const std::string& out_root,
                     std::ostream* log) {
  if (mixes.empty() || dims.empty() || seeds.empty())
    raise("EmptyGrid", "mixes, dims and seeds must all be nonempty");
  fs::create_directories(out_root);
  const std::string manifest_path = out_root + "/sweep_manifest.csv";

  std::set<std::string> acc_col_set;
  for (const MixData& mix : mixes)
    for (const TaskDataset& td : mix.tasks) acc_col_set.insert(td.name);
  std::vector<std::string> acc_columns(acc_col_set.begin(), acc_col_set.end());

  std::set<std::string> present;
  if (fs::exists(manifest_path))
    for (const ManifestRow& r : read_manifest(manifest_path))
      present.insert(r.mix + "|" + std::to_string(r.n_embed) + "|" + std::to_string(r.seed));

  GridOutcome out;
  for (const MixData& mix : mixes) {
    for (int dim : dims) {
      for (uint64_t seed : seeds) {
        ModelConfig model = base_model;
        model.n_embed = dim;
        model.vocab_size = int(mix.vocab.size());
        TrainConfig tc = base_train;
        tc.seed = seed;
        const std::string cell_dir =
            out_root + "/" + mix.name + "/d" + std::to_string(dim) + "_s" + std::to_string(seed);
        const std::string tag =
            "mix=" + mix.name + " d=" + std::to_string(dim) + " s=" + std::to_string(seed);
        try {
          ManifestRow row;
          row.mix = mix.name;
          row.n_embed = dim;
          row.seed = seed;
          if (run_dir_complete(cell_dir)) {
            RunSummary sum = read_run_summary(cell_dir);
            if (sum.params != count_params(model))
              raise("StaleRunDir", cell_dir + " holds params=" + std::to_string(sum.params) +
                                       ", expected " + std::to_string(count_params(model)));
            row.params = sum.params;
            row.acc = sum.final_acc;
            double loss_sum = 0;
            for (const auto& [t, l] : sum.final_loss) loss_sum += l;
            row.loss = loss_sum / double(sum.final_loss.size());
            if (log) *log << "[sweep] " << tag << " cached (params=" << row.params << ")\n";
          } else {
            if (fs::exists(cell_dir)) fs::remove_all(cell_dir);
            RunRecord rec = train(model, tc, mix.vocab, mix.tasks);
            write_run_dir(cell_dir, rec);
            row.params = rec.params;
            row.acc = rec.final_acc;
            double loss_sum = 0;
            for (const auto& [t, l] : rec.final_loss) loss_sum += l;
            row.loss = loss_sum / double(rec.final_loss.size());
            if (log) {
              *log << "[sweep] " << tag << " params=" << row.params << " stop=" << rec.stopped_at
                   << " (" << rec.stop_reason << ", " << fmt_double(rec.wall_seconds) << "s)";
              for (const auto& [t, a] : row.acc) *log << " acc_" << t << "=" << fmt_double(a);
              *log << "\n";
              log->flush();
            }
          }
          const std::string key =
              row.mix + "|" + std::to_string(row.n_embed) + "|" + std::to_string(row.seed);
          if (!present.count(key)) {
            append_manifest_row(manifest_path, row, acc_columns);
            present.insert(key);
          }
          out.rows.push_back(std::move(row));
        } catch (const Error& e) {
          out.failures.push_back(tag + ": " + e.what());
          if (log) *log << "[sweep] " << tag << " FAILED: " << e.what() << "\n";
        }
      }
    }
  }
  if (!out.failures.empty()) {
    std::ofstream f(out_root + "/failures.txt", std::ios::app);
    for (const std::string& line : out.failures) f << line << "\n";
  }
  return out;
}

std::map<std::string, TransitionCurve> curves_for_mix(const std::vector<ManifestRow>& rows,
                                                      const std::string& mix) {
  std::map<std::string, TransitionCurve> curves;
  for (const ManifestRow& r : rows) {
    if (r.mix != mix) continue;
    for (const auto& [task, a] : r.acc)
      curves[task].points.push_back({double(r.params), a, r.seed});
  }
  if (curves.empty()) raise("EmptyCurve", "no manifest rows for mix " + mix);
  return curves;
}

void write_transitions(const std::string& path, const std::vector<TransitionRow>& rows) {
  std::ofstream out(path);
  if (!out) raise("IoError", "cannot open " + path);
  out << "mix,task,L,k,x0,p_star\n";
  for (const TransitionRow& r : rows)
    out << r.mix << ',' << r.task << ',' << fmt_double(r.fit.asymptote) << ','
        << fmt_double(r.fit.steepness) << ',' << fmt_double(r.fit.midpoint) << ','
        << fmt_double(r.p_star) << "\n";
}

std::vector<TransitionRow> read_transitions(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise("IoError", "cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line != "mix,task,L,k,x0,p_star") raise("IoError", "bad transitions header: " + line);
  std::vector<TransitionRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv(line);
    if (f.size() != 6) raise("IoError", "bad transitions row: " + line);
    TransitionRow r;
    r.mix = f[0];
    r.task = f[1];
    r.fit.asymptote = std::stod(f[2]);
    r.fit.steepness = std::stod(f[3]);
    r.fit.midpoint = std::stod(f[4]);
    r.p_star = std::stod(f[5]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<TransitionRow> fit_manifest(const std::vector<ManifestRow>& rows) {
  std::vector<std::string> mix_order;
  for (const ManifestRow& r : rows)
    if (std::find(mix_order.begin(), mix_order.end(), r.mix) == mix_order.end())
      mix_order.push_back(r.mix);
  std::vector<TransitionRow> out;
  for (const std::string& mix : mix_order) {
    for (const auto& [task, curve] : curves_for_mix(rows, mix)) {
      TransitionRow tr;
      tr.mix = mix;
      tr.task = task;
      tr.fit = fit_logistic(curve.points);
      tr.p_star = transition_point(tr.fit);
      out.push_back(std::move(tr));
    }
  }
  return out;
}

std::vector<TransitionRow> fit_manifest_resilient(const std::vector<ManifestRow>& rows,
                                                  std::vector<std::string>* failures) {
  std::vector<std::string> mix_order;
  for (const ManifestRow& r : rows)
    if (std::find(mix_order.begin(), mix_order.end(), r.mix) == mix_order.end())
      mix_order.push_back(r.mix);
  std::vector<TransitionRow> out;
  for (const std::string& mix : mix_order) {
    for (const auto& [task, curve] : curves_for_mix(rows, mix)) {
      try {
        TransitionRow tr;
        tr.mix = mix;
        tr.task = task;
        tr.fit = fit_logistic(curve.points);
        tr.p_star = transition_point(tr.fit);
        out.push_back(std::move(tr));
      } catch (const Error& err) {
        if (failures) failures->push_back(mix + "/" + task + ": " + err.what());
      }
    }
  }
  return out;
}

CurriculumData build_curriculum_mix(const TaskSpec& target_spec,
                                    const std::vector<OpKind>& scaffold_ops, int lines_per_task,
                                    uint64_t data_seed) {
  if (scaffold_ops.empty()) raise("EmptyOpSet", "curriculum needs at least one scaffold op");
  TaskSpec union_spec = target_spec;
  union_spec.ops.insert(union_spec.ops.end(), scaffold_ops.begin(), scaffold_ops.end());
  if (std::find(union_spec.ops.begin(), union_spec.ops.end(), OpKind::ShufAdd) ==
      union_spec.ops.end())
    union_spec.shuffle_seed.reset();
  validate_task(union_spec);

  CurriculumData cur;
  cur.vocab = make_vocab(make_domain(union_spec));
  MixData target_mix = build_mix(target_spec, lines_per_task, data_seed);
  cur.target = std::move(target_mix.tasks);

  std::vector<OpKind> scaffold = scaffold_ops;
  std::sort(scaffold.begin(), scaffold.end());
  scaffold.erase(std::unique(scaffold.begin(), scaffold.end()), scaffold.end());
  Rng root(data_seed);
  for (size_t i = 0; i < scaffold.size(); ++i) {
    TaskDataset td;
    auto shared = std::find_if(cur.target.begin(), cur.target.end(), [&](const TaskDataset& t) {
      return t.name == ops_name({scaffold[i]});
    });
    if (shared != cur.target.end()) {
      td = *shared;
    } else {
      TaskSpec single = target_spec;
      single.ops = {scaffold[i]};
      if (scaffold[i] != OpKind::ShufAdd) single.shuffle_seed.reset();
      validate_task(single);
      Domain dom = make_domain(single);
      Rng stream = root.stream(100 + i);
      DatasetSplit split = make_dataset(dom, lines_per_task, stream);
      td.name = ops_name(single.ops);
      td.train = std::move(split.train);
      td.test = std::move(split.test);
    }
    td.name = "scaffold_" + td.name;
    cur.scaffold.push_back(std::move(td));
  }
  return cur;
}

ComplexityTable complexity_grid(const TaskSpec& base_spec, const std::vector<int>& args_list,
                                const std::vector<int>& depths_list, const std::vector<int>& dims,
                                const std::vector<uint64_t>& seeds, int lines_per_task,
                                uint64_t data_seed, const ModelConfig& base_model,
                                const TrainConfig& base_train, const std::string& out_root,
                                std::ostream* log) {
  ComplexityTable table;
  std::map<int, std::pair<double, int>> sums;
  for (int args : args_list) {
    for (int depth : depths_list) {
      TaskSpec spec = base_spec;
      spec.max_args = args;
      spec.max_depth = depth;
      const std::string cell_root =
          out_root + "/a" + std::to_string(args) + "_d" + std::to_string(depth);
      try {
        MixData mix = build_mix(spec, lines_per_task, data_seed);
        GridOutcome grid = run_grid({mix}, dims, seeds, base_model, base_train, cell_root, log);
        std::vector<CurvePoint> points;
        for (const ManifestRow& r : grid.rows) {
          double mean_acc = 0;
          for (const auto& [t, a] : r.acc) mean_acc += a;
          points.push_back({double(r.params), mean_acc / double(r.acc.size()), r.seed});
        }
        LogisticFit fit = fit_logistic(points);
        const double p_star = transition_point(fit);
        table.cells.push_back({args, depth, p_star});
        auto& slot = sums[args + depth];
        slot.first += p_star;
        slot.second += 1;
      } catch (const Error& e) {
        if (log) *log << "[complexity] a=" << args << " d=" << depth << " FAILED: " << e.what()
                      << "\n";
      }
    }
  }
  for (const auto& [sum, acc_n] : sums) table.by_sum.push_back({sum, acc_n.first / acc_n.second});
  return table;
}

}  // namespace listops
