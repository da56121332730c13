// Experiment configuration: one text file describing task, model, training,
// optional curriculum, and the run/sweep grid, with a lossless round trip.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "listops/model.hpp"
#include "listops/task.hpp"
#include "listops/train.hpp"

namespace listops {

struct ExperimentConfig {
  TaskSpec task;       // [task]; the target task of train/curriculum runs
  ModelConfig model;   // [model]; vocab_size is derived from data, never a key
  TrainConfig train;   // [train]
  std::optional<CurriculumSchedule> schedule;  // [curriculum], optional
  std::vector<OpKind> scaffold_ops;            // curriculum phase-A mixture
  // [run]
  std::string out_dir;
  std::vector<std::string> mixes;  // sweep mixtures, e.g. "add" "add+prod"
  std::vector<int> dims;
  std::vector<uint64_t> seeds;
  int lines = 0;  // generation attempts per task; 0 = 5000 * modulus
  uint64_t data_seed = 0;
};

// Flat `key = value` lines under [section] headers. Unknown keys and sections
// raise UnknownKey with the line number; unparseable values raise
// TypeMismatch with the key name.
ExperimentConfig parse_config(const std::string& text);
std::string serialize_config(const ExperimentConfig& cfg);

ExperimentConfig read_config_file(const std::string& path);
void write_config_file(const std::string& path, const ExperimentConfig& cfg);

// Apply one "section.key=value" assignment, e.g. "train.max_iters=500".
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

}  // namespace listops
