// Small probe of early-stopping behavior ahead of the full sweep campaign:
// three representative cells of the mod-10 grid, full dataset and batch size.
#include <cstdlib>
#include <iostream>
#include <string>

#include "listops/dataset.hpp"
#include "listops/sweep.hpp"

using namespace listops;

int main(int argc, char** argv) {
  const std::string root = argc > 1 ? argv[1] : "/root/proj/runs/pilot";
  const int lines = dataset_size_for(10);

  TaskSpec max_spec;
  max_spec.ops = {OpKind::Max};
  TaskSpec add_spec;
  add_spec.ops = {OpKind::Add};

  std::cerr << "[pilot] building datasets\n";
  MixData max_mix = build_mix(max_spec, lines, 101);
  MixData add_mix = build_mix(add_spec, lines, 101);

  ModelConfig model;
  TrainConfig tc;

  run_grid({max_mix}, {8, 64}, {1}, model, tc, root + "/max", &std::cerr);
  run_grid({add_mix}, {8}, {1}, model, tc, root + "/add", &std::cerr);
  return 0;
}
