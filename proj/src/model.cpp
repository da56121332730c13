#include "listops/model.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "listops/common.hpp"

namespace listops {

void validate_model(const ModelConfig& cfg) {
  if (cfg.n_embed <= 0) raise("BadModelConfig", "n_embed must be positive");
  if (cfg.n_head != 1 && cfg.n_head != 4) raise("BadModelConfig", "n_head must be 1 or 4");
  if (cfg.n_embed % cfg.n_head != 0) raise("BadModelConfig", "n_embed must be divisible by n_head");
  if (cfg.variant == Variant::Recurrent && cfg.steps < 1)
    raise("BadModelConfig", "steps must be >= 1");
  if (cfg.variant == Variant::Deep && cfg.layers < 1)
    raise("BadModelConfig", "layers must be >= 1");
  if (cfg.context < 1) raise("BadModelConfig", "context must be >= 1");
  if (cfg.vocab_size < 1) raise("BadModelConfig", "vocab_size must be >= 1");
  if (cfg.ffn_mult < 1) raise("BadModelConfig", "ffn_mult must be >= 1");
}

long long count_params(const ModelConfig& cfg) {
  const long long d = cfg.n_embed;
  const long long v = cfg.vocab_size;
  const long long f = cfg.ffn_mult * d;
  const long long per_block = 4 * d          // two layer norms, gain + bias
                              + 4 * d * d    // wq wk wv wo
                              + d * f + f    // w_in, b_in
                              + f * d + d;   // w_out, b_out
  return v * d + cfg.context * d + cfg.block_count() * per_block + 2 * d + d * v;
}

template <typename S>
void Params<S>::allocate(const ModelConfig& cfg) {
  validate_model(cfg);
  const int d = cfg.n_embed;
  const int f = cfg.ffn_mult * d;
  tok_emb = MatX<S>::Zero(cfg.vocab_size, d);
  pos_emb = MatX<S>::Zero(cfg.context, d);
  blocks.assign(cfg.block_count(), {});
  for (auto& b : blocks) {
    b.ln1_g = VecX<S>::Zero(d);
    b.ln1_b = VecX<S>::Zero(d);
    b.ln2_g = VecX<S>::Zero(d);
    b.ln2_b = VecX<S>::Zero(d);
    b.wq = MatX<S>::Zero(d, d);
    b.wk = MatX<S>::Zero(d, d);
    b.wv = MatX<S>::Zero(d, d);
    b.wo = MatX<S>::Zero(d, d);
    b.w_in = MatX<S>::Zero(d, f);
    b.b_in = VecX<S>::Zero(f);
    b.w_out = MatX<S>::Zero(f, d);
    b.b_out = VecX<S>::Zero(d);
  }
  lnf_g = VecX<S>::Zero(d);
  lnf_b = VecX<S>::Zero(d);
  unembed = MatX<S>::Zero(d, cfg.vocab_size);
}

namespace {

template <typename S>
void fill_normal(MatX<S>& m, Rng& rng, double sd) {
  S* p = m.data();
  for (long long i = 0; i < m.size(); ++i) p[i] = S(rng.normal() * sd);
}

}  // namespace

template <typename S>
void Params<S>::init(const ModelConfig& cfg, Rng& rng) {
  allocate(cfg);
  const double sd = 0.02;
  // Weight draw order is part of the reproducibility contract:
  // tok_emb, pos_emb, per block (wq wk wv wo w_in w_out), unembed.
  fill_normal(tok_emb, rng, sd);
  fill_normal(pos_emb, rng, sd);
  for (auto& b : blocks) {
    fill_normal(b.wq, rng, sd);
    fill_normal(b.wk, rng, sd);
    fill_normal(b.wv, rng, sd);
    fill_normal(b.wo, rng, sd);
    fill_normal(b.w_in, rng, sd);
    fill_normal(b.w_out, rng, sd);
    b.ln1_g.setOnes();
    b.ln2_g.setOnes();
  }
  lnf_g.setOnes();
  fill_normal(unembed, rng, sd);
}

template <typename S>
void Params<S>::set_zero() {
  for (auto& r : tensor_refs()) std::memset(r.data, 0, sizeof(S) * size_t(r.size));
}

template <typename S>
long long Params<S>::scalar_count() const {
  long long n = tok_emb.size() + pos_emb.size() + lnf_g.size() + lnf_b.size() + unembed.size();
  for (const auto& b : blocks)
    n += b.ln1_g.size() + b.ln1_b.size() + b.wq.size() + b.wk.size() + b.wv.size() + b.wo.size() +
         b.ln2_g.size() + b.ln2_b.size() + b.w_in.size() + b.b_in.size() + b.w_out.size() +
         b.b_out.size();
  return n;
}

template <typename S>
std::vector<TensorRef<S>> Params<S>::tensor_refs() {
  std::vector<TensorRef<S>> refs;
  auto add = [&](const std::string& name, auto& m) {
    refs.push_back({name, m.data(), (long long)m.size()});
  };
  add("tok_emb", tok_emb);
  add("pos_emb", pos_emb);
  for (size_t i = 0; i < blocks.size(); ++i) {
    auto& b = blocks[i];
    const std::string pre = "block" + std::to_string(i) + ".";
    add(pre + "ln1_g", b.ln1_g);
    add(pre + "ln1_b", b.ln1_b);
    add(pre + "wq", b.wq);
    add(pre + "wk", b.wk);
    add(pre + "wv", b.wv);
    add(pre + "wo", b.wo);
    add(pre + "ln2_g", b.ln2_g);
    add(pre + "ln2_b", b.ln2_b);
    add(pre + "w_in", b.w_in);
    add(pre + "b_in", b.b_in);
    add(pre + "w_out", b.w_out);
    add(pre + "b_out", b.b_out);
  }
  add("lnf_g", lnf_g);
  add("lnf_b", lnf_b);
  add("unembed", unembed);
  return refs;
}

namespace {

template <typename S>
void ensure_cache(FwdCache<S>& c, const ModelConfig& cfg, int B, int L) {
  const int n = B * L;
  const int d = cfg.n_embed;
  const int f = cfg.ffn_mult * d;
  c.B = B;
  c.L = L;
  c.steps.resize(cfg.step_count());
  for (auto& sc : c.steps) {
    sc.x_in.resize(n, d);
    sc.ln1_xhat.resize(n, d);
    sc.ln1_out.resize(n, d);
    sc.ln1_rstd.resize(n);
    sc.q.resize(n, d);
    sc.k.resize(n, d);
    sc.v.resize(n, d);
    sc.ctx.resize(n, d);
    sc.att.resize(cfg.n_head);
    for (auto& a : sc.att) a.resize(n, L);
    sc.x_mid.resize(n, d);
    sc.ln2_xhat.resize(n, d);
    sc.ln2_out.resize(n, d);
    sc.ln2_rstd.resize(n);
    sc.h_pre.resize(n, f);
    sc.h.resize(n, f);
  }
  c.x_final.resize(n, d);
  c.lnf_xhat.resize(n, d);
  c.lnf_out.resize(n, d);
  c.lnf_rstd.resize(n);
  c.logits.resize(n, cfg.vocab_size);
  c.dlogits.resize(n, cfg.vocab_size);
}

// Causal multi-head attention plus residual: x_mid = x_in + Wo(ctx).
template <typename S>
void attention_forward(const Block<S>& w, const ModelConfig& cfg, StepCache<S>& sc, int B, int L) {
  const int d = cfg.n_embed;
  const int H = cfg.n_head;
  const int dh = d / H;
  const S scale = S(1) / std::sqrt(S(dh));
  sc.q.noalias() = sc.ln1_out * w.wq;
  sc.k.noalias() = sc.ln1_out * w.wk;
  sc.v.noalias() = sc.ln1_out * w.wv;
  for (int h = 0; h < H; ++h) {
    MatX<S>& att = sc.att[h];
    for (int b = 0; b < B; ++b) {
      const int r0 = b * L;
      auto qb = sc.q.block(r0, h * dh, L, dh);
      auto kb = sc.k.block(r0, h * dh, L, dh);
      auto vb = sc.v.block(r0, h * dh, L, dh);
      auto ab = att.middleRows(r0, L);
      ab.noalias() = qb * kb.transpose() * scale;
      for (int i = 0; i < L; ++i) {
        auto row = ab.row(i).head(i + 1);
        const S m = row.maxCoeff();
        row = (row.array() - m).exp().matrix();
        row /= row.sum();
        if (i + 1 < L) ab.row(i).tail(L - i - 1).setZero();
      }
      sc.ctx.block(r0, h * dh, L, dh).noalias() = ab * vb;
    }
  }
  sc.x_mid.noalias() = sc.ctx * w.wo;
  sc.x_mid += sc.x_in;
}

template <typename S>
void step_forward(const Block<S>& w, const ModelConfig& cfg, StepCache<S>& sc, MatX<S>& x_out,
                  int B, int L) {
  detail::layernorm_forward(sc.x_in, w.ln1_g, w.ln1_b, sc.ln1_xhat, sc.ln1_rstd, sc.ln1_out);
  attention_forward(w, cfg, sc, B, L);
  detail::layernorm_forward(sc.x_mid, w.ln2_g, w.ln2_b, sc.ln2_xhat, sc.ln2_rstd, sc.ln2_out);
  sc.h_pre.noalias() = sc.ln2_out * w.w_in;
  sc.h_pre.array().rowwise() += w.b_in.transpose().array();
  detail::gelu_matrix(sc.h_pre, sc.h);
  x_out.noalias() = sc.h * w.w_out;
  x_out.array().rowwise() += w.b_out.transpose().array();
  x_out += sc.x_mid;
}

// d(x_out) -> d(x_in), accumulating weight grads.
template <typename S>
void step_backward(const Block<S>& w, Block<S>& g, const ModelConfig& cfg, const StepCache<S>& sc,
                   MatX<S>& dx, int B, int L) {
  const int d = cfg.n_embed;
  const int H = cfg.n_head;
  const int dh = d / H;
  const S scale = S(1) / std::sqrt(S(dh));

  // FFN branch.
  g.b_out.noalias() += dx.colwise().sum().transpose();
  g.w_out.noalias() += sc.h.transpose() * dx;
  MatX<S> dh_pre = dx * w.w_out.transpose();
  detail::gelu_grad_matrix(sc.h_pre, dh_pre);
  g.b_in.noalias() += dh_pre.colwise().sum().transpose();
  g.w_in.noalias() += sc.ln2_out.transpose() * dh_pre;
  MatX<S> d_ln2_out = dh_pre * w.w_in.transpose();
  MatX<S> dx_mid;
  detail::layernorm_backward(d_ln2_out, sc.ln2_xhat, sc.ln2_rstd, w.ln2_g, dx_mid, g.ln2_g,
                             g.ln2_b);
  dx_mid += dx;  // residual around the FFN

  // Attention branch.
  g.wo.noalias() += sc.ctx.transpose() * dx_mid;
  MatX<S> dctx = dx_mid * w.wo.transpose();
  MatX<S> dq = MatX<S>::Zero(B * L, d);
  MatX<S> dk = MatX<S>::Zero(B * L, d);
  MatX<S> dv = MatX<S>::Zero(B * L, d);
  for (int h = 0; h < H; ++h) {
    const MatX<S>& att = sc.att[h];
    for (int b = 0; b < B; ++b) {
      const int r0 = b * L;
      auto ab = att.middleRows(r0, L);
      auto kb = sc.k.block(r0, h * dh, L, dh);
      auto qb = sc.q.block(r0, h * dh, L, dh);
      auto vb = sc.v.block(r0, h * dh, L, dh);
      auto dcb = dctx.block(r0, h * dh, L, dh);
      MatX<S> da(L, L);
      da.noalias() = dcb * vb.transpose();
      dv.block(r0, h * dh, L, dh).noalias() += ab.transpose() * dcb;
      // softmax backward per row; masked entries have att == 0 so they drop out
      VecX<S> rowdot = (da.array() * ab.array()).rowwise().sum().matrix();
      da.array().colwise() -= rowdot.array();
      da.array() *= ab.array();
      dq.block(r0, h * dh, L, dh).noalias() += da * kb * scale;
      dk.block(r0, h * dh, L, dh).noalias() += da.transpose() * qb * scale;
    }
  }
  g.wq.noalias() += sc.ln1_out.transpose() * dq;
  g.wk.noalias() += sc.ln1_out.transpose() * dk;
  g.wv.noalias() += sc.ln1_out.transpose() * dv;
  MatX<S> d_ln1_out = dq * w.wq.transpose();
  d_ln1_out.noalias() += dk * w.wk.transpose();
  d_ln1_out.noalias() += dv * w.wv.transpose();
  MatX<S> dx_in;
  detail::layernorm_backward(d_ln1_out, sc.ln1_xhat, sc.ln1_rstd, w.ln1_g, dx_in, g.ln1_g,
                             g.ln1_b);
  dx = dx_mid + dx_in;  // residual around attention
}

}  // namespace

template <typename S>
void forward(const Params<S>& p, const ModelConfig& cfg, std::span<const int> ids, int B, int L,
             FwdCache<S>& cache) {
  if (L > cfg.context) raise("SequenceTooLong", std::to_string(L));
  if ((long long)ids.size() != (long long)B * L) raise("BadBatchShape", std::to_string(ids.size()));
  for (int t : ids)
    if (t < 0 || t >= cfg.vocab_size) raise("TokenOutOfRange", std::to_string(t));
  ensure_cache(cache, cfg, B, L);
  cache.ids.assign(ids.begin(), ids.end());

  MatX<S>& x0 = cache.steps[0].x_in;
  for (int r = 0; r < B * L; ++r)
    x0.row(r) = p.tok_emb.row(ids[r]) + p.pos_emb.row(r % L);

  const int T = cfg.step_count();
  for (int s = 0; s < T; ++s) {
    const Block<S>& w = p.blocks[cfg.block_for_step(s)];
    MatX<S>& x_out = (s + 1 < T) ? cache.steps[s + 1].x_in : cache.x_final;
    step_forward(w, cfg, cache.steps[s], x_out, B, L);
  }
  detail::layernorm_forward(cache.x_final, p.lnf_g, p.lnf_b, cache.lnf_xhat, cache.lnf_rstd,
                            cache.lnf_out);
  cache.logits.noalias() = cache.lnf_out * p.unembed;
}

namespace {

// Cross-entropy over positions with target >= 0; fills cache.dlogits with
// d(loss)/d(logits) when want_grad.
template <typename S>
S cross_entropy(FwdCache<S>& cache, std::span<const int> targets, bool want_grad) {
  const auto n = cache.logits.rows();
  if ((long long)targets.size() != n) raise("BadBatchShape", "targets");
  long long counted = 0;
  for (int t : targets)
    if (t >= 0) ++counted;
  if (counted == 0) raise("BadBatchShape", "no scored positions");
  double loss = 0;
  if (want_grad) cache.dlogits.setZero();
  VecX<S> e(cache.logits.cols());
  for (long long r = 0; r < n; ++r) {
    const int t = targets[r];
    if (t < 0) continue;
    auto row = cache.logits.row(r);
    const S m = row.maxCoeff();
    e = (row.transpose().array() - m).exp().matrix();
    const S z = e.sum();
    loss += double(m) + std::log(double(z)) - double(row[t]);
    if (want_grad) {
      cache.dlogits.row(r) = e.transpose() / (z * S(counted));
      cache.dlogits(r, t) -= S(1) / S(counted);
    }
  }
  return S(loss / double(counted));
}

}  // namespace

template <typename S>
S loss_only(const Params<S>& p, const ModelConfig& cfg, std::span<const int> ids,
            std::span<const int> targets, int B, int L, FwdCache<S>& cache) {
  forward(p, cfg, ids, B, L, cache);
  return cross_entropy(cache, targets, false);
}

template <typename S>
S loss_and_grads(const Params<S>& p, const ModelConfig& cfg, std::span<const int> ids,
                 std::span<const int> targets, int B, int L, Params<S>& grads,
                 FwdCache<S>& cache) {
  forward(p, cfg, ids, B, L, cache);
  const S loss = cross_entropy(cache, targets, true);
  if (grads.unembed.size() == 0) grads.allocate(cfg);
  grads.set_zero();

  grads.unembed.noalias() += cache.lnf_out.transpose() * cache.dlogits;
  MatX<S> d_lnf_out = cache.dlogits * p.unembed.transpose();
  MatX<S> dx;
  detail::layernorm_backward(d_lnf_out, cache.lnf_xhat, cache.lnf_rstd, p.lnf_g, dx, grads.lnf_g,
                             grads.lnf_b);

  const int T = cfg.step_count();
  for (int s = T - 1; s >= 0; --s) {
    const int bi = cfg.block_for_step(s);
    step_backward(p.blocks[bi], grads.blocks[bi], cfg, cache.steps[s], dx, B, L);
  }
  for (int r = 0; r < B * L; ++r) {
    grads.tok_emb.row(cache.ids[r]) += dx.row(r);
    grads.pos_emb.row(r % L) += dx.row(r);
  }
  return loss;
}

template <typename S>
NormRatios norm_ratios(const Params<S>& p, const ModelConfig& cfg, std::span<const int> ids) {
  const int L = int(ids.size());
  FwdCache<S> cache;
  forward(p, cfg, ids, 1, L, cache);
  NormRatios out;
  const int T = cfg.step_count();
  out.r_attn.assign(T, std::vector<double>(L));
  out.r_ffwd.assign(T, std::vector<double>(L));
  for (int s = 0; s < T; ++s) {
    const StepCache<S>& sc = cache.steps[s];
    const Block<S>& w = p.blocks[cfg.block_for_step(s)];
    MatX<S> att_out = sc.ctx * w.wo;
    MatX<S> ffn_out = sc.h * w.w_out;
    ffn_out.array().rowwise() += w.b_out.transpose().array();
    for (int i = 0; i < L; ++i) {
      const double xn = double(sc.x_in.row(i).norm());
      const double mn = double(sc.x_mid.row(i).norm());
      out.r_attn[s][i] = xn > 0 ? double(att_out.row(i).norm()) / xn : 0.0;
      out.r_ffwd[s][i] = mn > 0 ? double(ffn_out.row(i).norm()) / mn : 0.0;
    }
  }
  return out;
}

template <typename S>
void DecodeState<S>::reset(const ModelConfig& cfg) {
  K.assign(cfg.step_count(), MatX<S>::Zero(cfg.context, cfg.n_embed));
  V.assign(cfg.step_count(), MatX<S>::Zero(cfg.context, cfg.n_embed));
  pos = 0;
}

template <typename S>
VecX<S> DecodeState<S>::feed(const Params<S>& p, const ModelConfig& cfg, int token) {
  if (pos >= cfg.context) raise("SequenceTooLong", std::to_string(pos + 1));
  if (token < 0 || token >= cfg.vocab_size) raise("TokenOutOfRange", std::to_string(token));
  const int d = cfg.n_embed;
  const int H = cfg.n_head;
  const int dh = d / H;
  const S scale = S(1) / std::sqrt(S(dh));
  Eigen::Matrix<S, 1, Eigen::Dynamic> x = p.tok_emb.row(token) + p.pos_emb.row(pos);
  MatX<S> xhat, out;
  VecX<S> rstd;
  const int T = cfg.step_count();
  for (int s = 0; s < T; ++s) {
    const Block<S>& w = p.blocks[cfg.block_for_step(s)];
    detail::layernorm_forward(MatX<S>(x), w.ln1_g, w.ln1_b, xhat, rstd, out);
    Eigen::Matrix<S, 1, Eigen::Dynamic> q = out * w.wq;
    K[s].row(pos) = out * w.wk;
    V[s].row(pos) = out * w.wv;
    Eigen::Matrix<S, 1, Eigen::Dynamic> ctx(1, d);
    for (int h = 0; h < H; ++h) {
      auto kb = K[s].block(0, h * dh, pos + 1, dh);
      auto vb = V[s].block(0, h * dh, pos + 1, dh);
      VecX<S> scores = kb * q.segment(h * dh, dh).transpose() * scale;
      const S m = scores.maxCoeff();
      scores = (scores.array() - m).exp().matrix();
      scores /= scores.sum();
      ctx.segment(h * dh, dh).noalias() = scores.transpose() * vb;
    }
    x += ctx * w.wo;
    detail::layernorm_forward(MatX<S>(x), w.ln2_g, w.ln2_b, xhat, rstd, out);
    Eigen::Matrix<S, 1, Eigen::Dynamic> hpre = out * w.w_in + w.b_in.transpose();
    Eigen::Matrix<S, 1, Eigen::Dynamic> h =
        hpre.unaryExpr([](S v) { return detail::gelu_scalar(v); });
    x += h * w.w_out + w.b_out.transpose();
  }
  detail::layernorm_forward(MatX<S>(x), p.lnf_g, p.lnf_b, xhat, rstd, out);
  VecX<S> logits = (out * p.unembed).transpose();
  ++pos;
  return logits;
}

// ---- checkpoint io ----

namespace {

void write_header(std::ostream& os, const ModelConfig& cfg) {
  os << "listops-checkpoint v1\n";
  os << "variant = " << (cfg.variant == Variant::Recurrent ? "recurrent" : "deep") << "\n";
  os << "n_embed = " << cfg.n_embed << "\n";
  os << "n_head = " << cfg.n_head << "\n";
  os << "steps = " << cfg.steps << "\n";
  os << "layers = " << cfg.layers << "\n";
  os << "context = " << cfg.context << "\n";
  os << "vocab_size = " << cfg.vocab_size << "\n";
  os << "ffn_mult = " << cfg.ffn_mult << "\n";
  os << "tensors\n";
}

ModelConfig read_header(std::istream& is, const std::string& path) {
  std::string line;
  if (!std::getline(is, line) || line != "listops-checkpoint v1")
    raise("BadCheckpoint", path + ": bad magic");
  ModelConfig cfg;
  while (std::getline(is, line)) {
    if (line == "tensors") return cfg;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) raise("BadCheckpoint", path + ": bad header line: " + line);
    const std::string key = line.substr(0, eq);
    const std::string val = line.substr(eq + 3);
    if (key == "variant") {
      if (val == "recurrent")
        cfg.variant = Variant::Recurrent;
      else if (val == "deep")
        cfg.variant = Variant::Deep;
      else
        raise("BadCheckpoint", path + ": bad variant: " + val);
    } else if (key == "n_embed")
      cfg.n_embed = std::stoi(val);
    else if (key == "n_head")
      cfg.n_head = std::stoi(val);
    else if (key == "steps")
      cfg.steps = std::stoi(val);
    else if (key == "layers")
      cfg.layers = std::stoi(val);
    else if (key == "context")
      cfg.context = std::stoi(val);
    else if (key == "vocab_size")
      cfg.vocab_size = std::stoi(val);
    else if (key == "ffn_mult")
      cfg.ffn_mult = std::stoi(val);
    else
      raise("BadCheckpoint", path + ": unknown header key: " + key);
  }
  raise("BadCheckpoint", path + ": truncated header");
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelConfig& cfg, Params<float>& params) {
  std::ofstream os(path, std::ios::binary);
  if (!os) raise("IoError", "cannot write " + path);
  write_header(os, cfg);
  for (auto& r : params.tensor_refs())
    os.write(reinterpret_cast<const char*>(r.data), std::streamsize(r.size * sizeof(float)));
  if (!os) raise("IoError", "short write to " + path);
}

ModelConfig load_checkpoint_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) raise("IoError", "cannot read " + path);
  return read_header(is, path);
}

void load_checkpoint(const std::string& path, ModelConfig& cfg, Params<float>& params) {
  std::ifstream is(path, std::ios::binary);
  if (!is) raise("IoError", "cannot read " + path);
  cfg = read_header(is, path);
  params.allocate(cfg);
  for (auto& r : params.tensor_refs()) {
    is.read(reinterpret_cast<char*>(r.data), std::streamsize(r.size * sizeof(float)));
    if (!is) raise("BadCheckpoint", path + ": truncated tensor " + r.name);
  }
}

void save_embedding(const std::string& path, const std::vector<std::string>& tokens,
                    const MatX<float>& emb) {
  if ((long long)tokens.size() != emb.rows()) raise("BadBatchShape", "token/row mismatch");
  std::ofstream os(path);
  if (!os) raise("IoError", "cannot write " + path);
  os << emb.rows() << " " << emb.cols() << "\n";
  os.precision(9);
  for (long long i = 0; i < emb.rows(); ++i) {
    os << tokens[i];
    for (long long j = 0; j < emb.cols(); ++j) os << " " << emb(i, j);
    os << "\n";
  }
  if (!os) raise("IoError", "short write to " + path);
}

MatX<double> load_embedding(const std::string& path, std::vector<std::string>* tokens) {
  std::ifstream is(path);
  if (!is) raise("IoError", "cannot read " + path);
  long long rows = 0, cols = 0;
  if (!(is >> rows >> cols) || rows <= 0 || cols <= 0)
    raise("IoError", path + ": bad embedding header");
  MatX<double> emb(rows, cols);
  if (tokens) tokens->clear();
  for (long long i = 0; i < rows; ++i) {
    std::string tok;
    if (!(is >> tok)) raise("IoError", path + ": truncated embedding");
    if (tokens) tokens->push_back(tok);
    for (long long j = 0; j < cols; ++j)
      if (!(is >> emb(i, j))) raise("IoError", path + ": truncated embedding");
  }
  return emb;
}

template struct Params<float>;
template struct Params<double>;
template void forward<float>(const Params<float>&, const ModelConfig&, std::span<const int>, int,
                             int, FwdCache<float>&);
template void forward<double>(const Params<double>&, const ModelConfig&, std::span<const int>, int,
                              int, FwdCache<double>&);
template float loss_only<float>(const Params<float>&, const ModelConfig&, std::span<const int>,
                                std::span<const int>, int, int, FwdCache<float>&);
template double loss_only<double>(const Params<double>&, const ModelConfig&, std::span<const int>,
                                  std::span<const int>, int, int, FwdCache<double>&);
template float loss_and_grads<float>(const Params<float>&, const ModelConfig&,
                                     std::span<const int>, std::span<const int>, int, int,
                                     Params<float>&, FwdCache<float>&);
template double loss_and_grads<double>(const Params<double>&, const ModelConfig&,
                                       std::span<const int>, std::span<const int>, int, int,
                                       Params<double>&, FwdCache<double>&);
template NormRatios norm_ratios<float>(const Params<float>&, const ModelConfig&,
                                       std::span<const int>);
template NormRatios norm_ratios<double>(const Params<double>&, const ModelConfig&,
                                        std::span<const int>);
template struct DecodeState<float>;
template struct DecodeState<double>;

}  // namespace listops
