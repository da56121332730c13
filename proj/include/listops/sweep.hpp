// Size sweeps across task mixtures, logistic accuracy-vs-size fits, and the
// joint-vs-pure transition-point ratios derived from them.
#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "listops/perm.hpp"
#include "listops/task.hpp"
#include "listops/train.hpp"

namespace listops {

// One observed (model size, accuracy) sample for one seed.
struct CurvePoint {
  double params = 0;
  double accuracy = 0;
  uint64_t seed = 0;
};

// a(p) = asymptote / (1 + exp(-steepness * (ln p - midpoint))).
struct LogisticFit {
  double asymptote = 0;  // in (0, 1]
  double steepness = 0;  // > 0
  double midpoint = 0;   // in ln-params space
};

// Parameter count where the fitted curve reaches 80% of its asymptote:
// exp(midpoint + ln(4) / steepness).
double transition_point(const LogisticFit& fit);

struct TransitionCurve {
  std::vector<CurvePoint> points;
  std::optional<LogisticFit> fit;
};

// Least-squares fit over ln(params). Seeds sharing a param count are averaged
// first; the asymptote has a closed form per (steepness, midpoint) candidate,
// found by coarse grid search plus monotone local refinement.
// Throws InsufficientPoints (<4 distinct param counts) and DegenerateCurve
// (all mean accuracies identical).
LogisticFit fit_logistic(const std::vector<CurvePoint>& points);

// p*_pure / p*_joint; > 1 means joint training lowered the transition.
// Throws MissingFit when either curve lacks a fit.
double transition_ratio(const TransitionCurve& pure, const TransitionCurve& joint);

// A task mixture ready to train: shared vocabulary plus one dataset per task.
struct MixData {
  std::string name;
  Vocab vocab;
  std::vector<TaskDataset> tasks;
};

// Build per-op datasets (each with its own exclusion split) over the joint
// vocabulary. lines_per_task are generation attempts before deduplication.
MixData build_mix(const TaskSpec& joint_spec, int lines_per_task, uint64_t data_seed);

// Permutation-group analog of build_mix over element tokens "g0".."g35".
MixData build_perm_mix(const perm::PermTaskSpec& joint_spec, int lines_per_task,
                       uint64_t data_seed);

// One sweep manifest row. acc holds one entry per task in the row's mix;
// loss is the mean final evaluation loss across those tasks.
struct ManifestRow {
  std::string mix;
  int n_embed = 0;
  long long params = 0;
  uint64_t seed = 0;
  std::map<std::string, double> acc;
  double loss = 0;
};

// CSV with header mix,n_embed,params,seed,acc_<task>...,loss. The acc column
// set is fixed at creation; appending with tasks outside it throws
// ManifestMismatch. Cells for tasks absent from a row's mix stay empty.
void append_manifest_row(const std::string& path, const ManifestRow& row,
                         const std::vector<std::string>& acc_columns);
std::vector<ManifestRow> read_manifest(const std::string& path);

struct GridOutcome {
  std::vector<ManifestRow> rows;
  std::vector<std::string> failures;  // "mix=.. d=.. s=..: kind: detail"
};

// Train every (mix, dim, seed) cell sequentially. Each cell writes a run
// directory out_root/<mix>/d<dim>_s<seed> and appends to
// out_root/sweep_manifest.csv; completed directories are reused, partially
// written ones are discarded and retrained. Cells that fail are recorded as
// missing and the grid continues.
GridOutcome run_grid(const std::vector<MixData>& mixes, const std::vector<int>& dims,
                     const std::vector<uint64_t>& seeds, const ModelConfig& base_model,
                     const TrainConfig& base_train, const std::string& out_root,
                     std::ostream* log = nullptr);

// Group one mix's manifest rows into per-task accuracy-vs-size curves
// (seed scatter kept; fits left empty for the caller).
std::map<std::string, TransitionCurve> curves_for_mix(const std::vector<ManifestRow>& rows,
                                                      const std::string& mix);

struct TransitionRow {
  std::string mix;
  std::string task;
  LogisticFit fit;
  double p_star = 0;
};

// CSV with header mix,task,L,k,x0,p_star.
void write_transitions(const std::string& path, const std::vector<TransitionRow>& rows);
std::vector<TransitionRow> read_transitions(const std::string& path);

// Fit every per-task curve of every mix present in `rows`; ordering follows
// first appearance in the manifest. Fit errors propagate.
std::vector<TransitionRow> fit_manifest(const std::vector<ManifestRow>& rows);

// fit_manifest, but a failed curve is skipped and recorded as
// "mix/task: kind: detail" instead of aborting the rest.
std::vector<TransitionRow> fit_manifest_resilient(const std::vector<ManifestRow>& rows,
                                                  std::vector<std::string>* failures);

// Target and scaffold datasets over the union vocabulary of both op sets.
// Scaffold ops shared with the target reuse the target split (keeping the
// exclusion guarantee); the rest draw fresh generator streams. Scaffold task
// names carry a "scaffold_" prefix.
struct CurriculumData {
  Vocab vocab;
  std::vector<TaskDataset> target;
  std::vector<TaskDataset> scaffold;
};
CurriculumData build_curriculum_mix(const TaskSpec& target_spec,
                                    const std::vector<OpKind>& scaffold_ops, int lines_per_task,
                                    uint64_t data_seed);

struct ComplexityCell {
  int max_args = 0;
  int max_depth = 0;
  double p_star = 0;
};

struct ComplexityTable {
  std::vector<ComplexityCell> cells;            // args-major over the request
  std::vector<std::pair<int, double>> by_sum;   // (args+depth, mean p*)
};

// Transition point per (max_args, max_depth) shape of base_spec, from a size
// sweep per cell. The per-row accuracy used for fitting is the mean across
// the mix's tasks. Cells whose sweep or fit fails are skipped like run_grid
// failures.
ComplexityTable complexity_grid(const TaskSpec& base_spec, const std::vector<int>& args_list,
                                const std::vector<int>& depths_list,
                                const std::vector<int>& dims,
                                const std::vector<uint64_t>& seeds, int lines_per_task,
                                uint64_t data_seed, const ModelConfig& base_model,
                                const TrainConfig& base_train, const std::string& out_root,
                                std::ostream* log = nullptr);

}  // namespace listops
