// Reports seconds per training iteration (forward + backward) at the packed
// batch shape used for training, across model widths.
#include <chrono>
#include <cstdio>
#include <vector>

#include "listops/model.hpp"
#include "listops/rng.hpp"

using namespace listops;

int main(int argc, char** argv) {
  std::vector<int> dims = {8, 16, 32, 64, 96, 128};
  if (argc > 1) {
    dims.clear();
    for (int i = 1; i < argc; ++i) dims.push_back(std::atoi(argv[i]));
  }
  const int B = 64, L = 128, V = 23;
  Rng data_rng(7);
  std::vector<int> ids, targets;
  for (int i = 0; i < B * L; ++i) ids.push_back(data_rng.uniform_int(0, V - 1));
  for (int i = 0; i < B * L; ++i) targets.push_back(data_rng.uniform_int(0, V - 1));

  for (int d : dims) {
    ModelConfig cfg;
    cfg.n_embed = d;
    cfg.vocab_size = V;
    Rng rng(1);
    Params<float> p;
    p.init(cfg, rng);
    Params<float> grads;
    FwdCache<float> cache;
    loss_and_grads(p, cfg, ids, targets, B, L, grads, cache);  // warm up
    const int iters = d >= 96 ? 3 : 5;
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < iters; ++i)
      loss_and_grads(p, cfg, ids, targets, B, L, grads, cache);
    const auto t1 = std::chrono::steady_clock::now();
    const double sec = std::chrono::duration<double>(t1 - t0).count() / iters;
    std::printf("d=%3d  %.3f s/iter  (%.1f s per 10k iters)\n", d, sec, sec * 1e4);
  }
  return 0;
}
