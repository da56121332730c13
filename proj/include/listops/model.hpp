// Tiny pre-norm transformer: one block applied T times with shared weights
// (recurrent) or L distinct blocks (deep). Causal self-attention, GELU FFN,
// learned absolute positions added once, untied unembedding. Forward,
// exact hand-derived gradients, parameter counting, norm ratios, greedy
// decoding with per-step K/V caches, and checkpoint io.
#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/SpecialFunctions>

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "listops/rng.hpp"

namespace listops {

template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

enum class Variant { Recurrent, Deep };

struct ModelConfig {
  int n_embed = 16;
  int n_head = 1;  // 1 or 4
  Variant variant = Variant::Recurrent;
  int steps = 4;   // recurrence count (Recurrent)
  int layers = 1;  // block count (Deep)
  int context = 128;
  int vocab_size = 0;
  int ffn_mult = 4;

  int block_count() const { return variant == Variant::Deep ? layers : 1; }
  int step_count() const { return variant == Variant::Deep ? layers : steps; }
  // Block applied at unroll step s.
  int block_for_step(int s) const { return variant == Variant::Deep ? s : 0; }
};

void validate_model(const ModelConfig& cfg);
long long count_params(const ModelConfig& cfg);

template <typename S>
struct Block {
  VecX<S> ln1_g, ln1_b, ln2_g, ln2_b;
  MatX<S> wq, wk, wv, wo;      // d x d
  MatX<S> w_in;                // d x 4d
  VecX<S> b_in;                // 4d
  MatX<S> w_out;               // 4d x d
  VecX<S> b_out;               // d
};

template <typename S>
struct TensorRef {
  std::string name;
  S* data;
  long long size;
};

template <typename S>
struct Params {
  MatX<S> tok_emb;  // V x d
  MatX<S> pos_emb;  // context x d
  std::vector<Block<S>> blocks;
  VecX<S> lnf_g, lnf_b;
  MatX<S> unembed;  // d x V

  void allocate(const ModelConfig& cfg);      // shapes, zero-filled
  void init(const ModelConfig& cfg, Rng& rng);  // N(0, 0.02) weights, 0 biases, 1 gains
  void set_zero();
  long long scalar_count() const;
  std::vector<TensorRef<S>> tensor_refs();    // fixed declared order
};

// Activations kept for the backward pass, one entry per unroll step.
template <typename S>
struct StepCache {
  MatX<S> x_in;                   // N x d
  MatX<S> ln1_xhat, ln1_out;      // N x d
  VecX<S> ln1_rstd;               // N
  MatX<S> q, k, v, ctx;           // N x d
  std::vector<MatX<S>> att;       // per head: N x L softmax rows
  MatX<S> x_mid;                  // N x d
  MatX<S> ln2_xhat, ln2_out;      // N x d
  VecX<S> ln2_rstd;               // N
  MatX<S> h_pre, h;               // N x 4d
};

template <typename S>
struct FwdCache {
  int B = 0, L = 0;
  std::vector<int> ids;
  std::vector<StepCache<S>> steps;
  MatX<S> x_final;                 // N x d
  MatX<S> lnf_xhat, lnf_out;      // N x d
  VecX<S> lnf_rstd;               // N
  MatX<S> logits;                 // N x V
  MatX<S> dlogits;                // N x V
};

// Batched forward over B sequences of length L (attention is causal within
// each sequence). Fills the cache; logits land in cache.logits.
template <typename S>
void forward(const Params<S>& p, const ModelConfig& cfg, std::span<const int> ids, int B, int L,
             FwdCache<S>& cache);

// Mean next-token cross-entropy over positions with target >= 0.
// Positions with target -1 are excluded from the mean.
template <typename S>
S loss_only(const Params<S>& p, const ModelConfig& cfg, std::span<const int> ids,
            std::span<const int> targets, int B, int L, FwdCache<S>& cache);

// Loss plus exact gradients (grads must be allocated; it is zeroed first).
template <typename S>
S loss_and_grads(const Params<S>& p, const ModelConfig& cfg, std::span<const int> ids,
                 std::span<const int> targets, int B, int L, Params<S>& grads,
                 FwdCache<S>& cache);

// Per-step, per-position output/input norm ratios over one sequence:
// r_attn = |SA(LN1(x))| / |x|, r_ffwd = |FFN(LN2(x1))| / |x1|.
struct NormRatios {
  std::vector<std::vector<double>> r_attn;  // [step][position]
  std::vector<std::vector<double>> r_ffwd;
};
template <typename S>
NormRatios norm_ratios(const Params<S>& p, const ModelConfig& cfg, std::span<const int> ids);

// Incremental greedy-decoding state; feeding a token returns the logits row
// for its position. Exactly matches the batched forward on the same prefix.
template <typename S>
struct DecodeState {
  std::vector<MatX<S>> K, V;  // per step: context x d
  int pos = 0;

  void reset(const ModelConfig& cfg);
  VecX<S> feed(const Params<S>& p, const ModelConfig& cfg, int token);
};

// Checkpoint: text header echoing the config, then raw little-endian float32
// tensors in declared order.
void save_checkpoint(const std::string& path, const ModelConfig& cfg, Params<float>& params);
ModelConfig load_checkpoint_config(const std::string& path);
void load_checkpoint(const std::string& path, ModelConfig& cfg, Params<float>& params);

// Embedding table as plain text: "V d" then one row per token: label + values.
void save_embedding(const std::string& path, const std::vector<std::string>& tokens,
                    const MatX<float>& emb);
MatX<double> load_embedding(const std::string& path, std::vector<std::string>* tokens = nullptr);

// ---- template definitions ----

namespace detail {

template <typename S>
void layernorm_forward(const MatX<S>& x, const VecX<S>& g, const VecX<S>& b, MatX<S>& xhat,
                       VecX<S>& rstd, MatX<S>& out) {
  const S eps = S(1e-5);
  const auto n = x.rows();
  VecX<S> mean = x.rowwise().mean();
  xhat = x;
  xhat.colwise() -= mean;
  VecX<S> var = xhat.array().square().rowwise().mean().matrix();
  rstd = (var.array() + eps).rsqrt().matrix();
  xhat.array().colwise() *= rstd.array();
  out = xhat;
  out.array().rowwise() *= g.transpose().array();
  out.array().rowwise() += b.transpose().array();
  (void)n;
}

// dy -> dx (returned in dx), accumulating gain/bias grads.
template <typename S>
void layernorm_backward(const MatX<S>& dy, const MatX<S>& xhat, const VecX<S>& rstd,
                        const VecX<S>& g, MatX<S>& dx, VecX<S>& dg, VecX<S>& db) {
  dg.noalias() += (dy.array() * xhat.array()).matrix().colwise().sum().transpose();
  db.noalias() += dy.colwise().sum().transpose();
  MatX<S> dxhat = dy;
  dxhat.array().rowwise() *= g.transpose().array();
  VecX<S> m1 = dxhat.rowwise().mean();
  VecX<S> m2 = (dxhat.array() * xhat.array()).rowwise().mean().matrix();
  dx = dxhat;
  dx.colwise() -= m1;
  dx.array() -= xhat.array().colwise() * m2.array();
  dx.array().colwise() *= rstd.array();
}

template <typename S>
S gelu_scalar(S x) {
  return S(0.5) * x * (S(1) + std::erf(x * S(M_SQRT1_2)));
}

template <typename S>
S gelu_grad_scalar(S x) {
  const S inv_sqrt_2pi = S(0.3989422804014326779);
  return S(0.5) * (S(1) + std::erf(x * S(M_SQRT1_2))) + x * inv_sqrt_2pi * std::exp(S(-0.5) * x * x);
}

// 0.5 x (1 + erf(x/sqrt 2)), vectorized over a whole activation matrix.
template <typename S>
void gelu_matrix(const MatX<S>& x, MatX<S>& out) {
  out = (S(0.5) * x.array() * (S(1) + (x.array() * S(M_SQRT1_2)).erf())).matrix();
}

// Multiplies dy in place by gelu'(x).
template <typename S>
void gelu_grad_matrix(const MatX<S>& x, MatX<S>& dy) {
  const S inv_sqrt_2pi = S(0.3989422804014326779);
  dy.array() *= S(0.5) * (S(1) + (x.array() * S(M_SQRT1_2)).erf()) +
                x.array() * inv_sqrt_2pi * (S(-0.5) * x.array().square()).exp();
}

}  // namespace detail

}  // namespace listops

// Instantiated for float and double in the library.
namespace listops {
extern template struct Params<float>;
extern template struct Params<double>;
extern template void forward<float>(const Params<float>&, const ModelConfig&, std::span<const int>,
                                    int, int, FwdCache<float>&);
extern template void forward<double>(const Params<double>&, const ModelConfig&,
                                     std::span<const int>, int, int, FwdCache<double>&);
extern template float loss_only<float>(const Params<float>&, const ModelConfig&,
                                       std::span<const int>, std::span<const int>, int, int,
                                       FwdCache<float>&);
extern template double loss_only<double>(const Params<double>&, const ModelConfig&,
                                         std::span<const int>, std::span<const int>, int, int,
                                         FwdCache<double>&);
extern template float loss_and_grads<float>(const Params<float>&, const ModelConfig&,
                                            std::span<const int>, std::span<const int>, int, int,
                                            Params<float>&, FwdCache<float>&);
extern template double loss_and_grads<double>(const Params<double>&, const ModelConfig&,
                                              std::span<const int>, std::span<const int>, int, int,
                                              Params<double>&, FwdCache<double>&);
extern template NormRatios norm_ratios<float>(const Params<float>&, const ModelConfig&,
                                              std::span<const int>);
extern template NormRatios norm_ratios<double>(const Params<double>&, const ModelConfig&,
                                               std::span<const int>);
extern template struct DecodeState<float>;
extern template struct DecodeState<double>;
}  // namespace listops
