#include "deepstage/nn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "deepstage/util.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace deepstage {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

double act_apply(Activation act, double z) {
  switch (act) {
    case Activation::identity: return z;
    case Activation::tanh_act: return std::tanh(z);
    case Activation::relu: return z > 0 ? z : 0.0;
  }
  return z;
}

double act_grad(Activation act, double pre, double post) {
  switch (act) {
    case Activation::identity: return 1.0;
    case Activation::tanh_act: return 1.0 - post * post;
    case Activation::relu: return pre > 0 ? 1.0 : 0.0;
  }
  return 1.0;
}

void glorot_fill(Tensor& w, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : w.data) v = rng.uniform(-limit, limit);
}

}  // namespace

// --------------------------------------------------------------------------
// Dense
// --------------------------------------------------------------------------

DenseLayer::DenseLayer(std::string name, std::size_t out_dim,
                       std::size_t in_dim, Activation act_in)
    : weight(name + "/w", Tensor::zeros({out_dim, in_dim})),
      bias(name + "/b", Tensor::zeros({out_dim})),
      act(act_in) {}

void DenseLayer::init_glorot(Rng& rng) {
  glorot_fill(weight.value, in_dim(), out_dim(), rng);
  bias.value.zero();
}

std::vector<Param*> DenseLayer::params() { return {&weight, &bias}; }

Tensor dense_forward(const DenseLayer& layer, const Tensor& x,
                     DenseCache* cache) {
  const std::size_t in = layer.in_dim();
  const std::size_t out = layer.out_dim();
  if (x.size() != in)
    fail("dense_forward shape mismatch: layer ", layer.weight.value.shape_str(),
         " expects input of ", in, ", got ", x.shape_str());
  Tensor y = Tensor::zeros({out});
  Tensor pre = Tensor::zeros({out});
  const double* w = layer.weight.value.data.data();
  for (std::size_t r = 0; r < out; ++r) {
    double z = layer.bias.value[r];
    const double* row = w + r * in;
    for (std::size_t c = 0; c < in; ++c) z += row[c] * x[c];
    pre[r] = z;
    y[r] = act_apply(layer.act, z);
  }
  if (cache) {
    cache->input = x;
    cache->pre = pre;
    cache->output = y;
  }
  return y;
}

Tensor dense_backward(DenseLayer& layer, const DenseCache& cache,
                      const Tensor& dy) {
  const std::size_t in = layer.in_dim();
  const std::size_t out = layer.out_dim();
  if (dy.size() != out)
    fail("dense_backward shape mismatch: expected ", out, " got ", dy.size());
  Tensor dx = Tensor::zeros({in});
  double* dw = layer.weight.grad.data.data();
  const double* w = layer.weight.value.data.data();
  for (std::size_t r = 0; r < out; ++r) {
    const double dz =
        dy[r] * act_grad(layer.act, cache.pre[r], cache.output[r]);
    layer.bias.grad[r] += dz;
    double* dwrow = dw + r * in;
    const double* wrow = w + r * in;
    for (std::size_t c = 0; c < in; ++c) {
      dwrow[c] += dz * cache.input[c];
      dx[c] += wrow[c] * dz;
    }
  }
  return dx;
}

// --------------------------------------------------------------------------
// LSTM
// --------------------------------------------------------------------------

LstmCell::LstmCell(std::string name, std::size_t input_dim_in,
                   std::size_t hidden_dim_in)
    : input_dim(input_dim_in),
      hidden_dim(hidden_dim_in),
      w_i(name + "/w_i", Tensor::zeros({hidden_dim_in, input_dim_in + hidden_dim_in})),
      w_f(name + "/w_f", Tensor::zeros({hidden_dim_in, input_dim_in + hidden_dim_in})),
      w_o(name + "/w_o", Tensor::zeros({hidden_dim_in, input_dim_in + hidden_dim_in})),
      w_g(name + "/w_g", Tensor::zeros({hidden_dim_in, input_dim_in + hidden_dim_in})),
      b_i(name + "/b_i", Tensor::zeros({hidden_dim_in})),
      b_f(name + "/b_f", Tensor::zeros({hidden_dim_in})),
      b_o(name + "/b_o", Tensor::zeros({hidden_dim_in})),
      b_g(name + "/b_g", Tensor::zeros({hidden_dim_in})) {}

void LstmCell::init_glorot(Rng& rng) {
  const std::size_t fan_in = input_dim + hidden_dim;
  glorot_fill(w_i.value, fan_in, hidden_dim, rng);
  glorot_fill(w_f.value, fan_in, hidden_dim, rng);
  glorot_fill(w_o.value, fan_in, hidden_dim, rng);
  glorot_fill(w_g.value, fan_in, hidden_dim, rng);
  b_i.value.zero();
  b_f.value.zero();
  std::fill(b_f.value.data.begin(), b_f.value.data.end(), 1.0);
  b_o.value.zero();
  b_g.value.zero();
}

std::vector<Param*> LstmCell::params() {
  return {&w_i, &w_f, &w_o, &w_g, &b_i, &b_f, &b_o, &b_g};
}

namespace {

void gate_matvec(const Tensor& w, const Tensor& b, const Tensor& xh,
                 Tensor& out) {
  const std::size_t rows = w.rows();
  const std::size_t cols = w.cols();
  const double* wd = w.data.data();
  for (std::size_t r = 0; r < rows; ++r) {
    double z = b[r];
    const double* row = wd + r * cols;
    for (std::size_t c = 0; c < cols; ++c) z += row[c] * xh[c];
    out[r] = z;
  }
}

}  // namespace

void lstm_step(const LstmCell& cell, const Tensor& x, const Tensor& h_prev,
               const Tensor& c_prev, Tensor& h_out, Tensor& c_out,
               LstmCache* cache) {
  const std::size_t I = cell.input_dim;
  const std::size_t H = cell.hidden_dim;
  if (x.size() != I || h_prev.size() != H || c_prev.size() != H)
    fail("lstm_step shape mismatch: cell expects input ", I, " hidden ", H,
         ", got x=", x.size(), " h=", h_prev.size(), " c=", c_prev.size());

  Tensor xh = Tensor::zeros({I + H});
  std::copy(x.data.begin(), x.data.end(), xh.data.begin());
  std::copy(h_prev.data.begin(), h_prev.data.end(), xh.data.begin() + I);

  Tensor gi = Tensor::zeros({H}), gf = Tensor::zeros({H}),
         go = Tensor::zeros({H}), gg = Tensor::zeros({H});
  gate_matvec(cell.w_i.value, cell.b_i.value, xh, gi);
  gate_matvec(cell.w_f.value, cell.b_f.value, xh, gf);
  gate_matvec(cell.w_o.value, cell.b_o.value, xh, go);
  gate_matvec(cell.w_g.value, cell.b_g.value, xh, gg);

  h_out = Tensor::zeros({H});
  c_out = Tensor::zeros({H});
  Tensor tanh_c = Tensor::zeros({H});
  for (std::size_t j = 0; j < H; ++j) {
    gi[j] = sigmoid(gi[j]);
    gf[j] = sigmoid(gf[j]);
    go[j] = sigmoid(go[j]);
    gg[j] = std::tanh(gg[j]);
    c_out[j] = gf[j] * c_prev[j] + gi[j] * gg[j];
    tanh_c[j] = std::tanh(c_out[j]);
    h_out[j] = go[j] * tanh_c[j];
  }
  if (cache) {
    cache->xh = std::move(xh);
    cache->gate_i = std::move(gi);
    cache->gate_f = std::move(gf);
    cache->gate_o = std::move(go);
    cache->gate_g = std::move(gg);
    cache->c_prev = c_prev;
    cache->c = c_out;
    cache->tanh_c = std::move(tanh_c);
  }
}

LstmGrads lstm_backward(LstmCell& cell, const LstmCache& cache,
                        const Tensor& dh, const Tensor& dc_in) {
  const std::size_t I = cell.input_dim;
  const std::size_t H = cell.hidden_dim;
  Tensor dzi = Tensor::zeros({H}), dzf = Tensor::zeros({H}),
         dzo = Tensor::zeros({H}), dzg = Tensor::zeros({H});
  LstmGrads out;
  out.dc_prev = Tensor::zeros({H});

  for (std::size_t j = 0; j < H; ++j) {
    const double i = cache.gate_i[j], f = cache.gate_f[j],
                 o = cache.gate_o[j], g = cache.gate_g[j];
    const double tc = cache.tanh_c[j];
    const double d_o = dh[j] * tc;
    const double dc = dc_in[j] + dh[j] * o * (1.0 - tc * tc);
    dzo[j] = d_o * o * (1.0 - o);
    dzf[j] = dc * cache.c_prev[j] * f * (1.0 - f);
    dzi[j] = dc * g * i * (1.0 - i);
    dzg[j] = dc * i * (1.0 - g * g);
    out.dc_prev[j] = dc * f;
  }

  Tensor dxh = Tensor::zeros({I + H});
  auto accumulate = [&](Param& w, Param& b, const Tensor& dz) {
    double* dw = w.grad.data.data();
    const double* wv = w.value.data.data();
    for (std::size_t r = 0; r < H; ++r) {
      b.grad[r] += dz[r];
      double* dwrow = dw + r * (I + H);
      const double* wrow = wv + r * (I + H);
      const double dzr = dz[r];
      for (std::size_t c = 0; c < I + H; ++c) {
        dwrow[c] += dzr * cache.xh[c];
        dxh[c] += wrow[c] * dzr;
      }
    }
  };
  accumulate(cell.w_i, cell.b_i, dzi);
  accumulate(cell.w_f, cell.b_f, dzf);
  accumulate(cell.w_o, cell.b_o, dzo);
  accumulate(cell.w_g, cell.b_g, dzg);

  out.dx = Tensor::zeros({I});
  out.dh_prev = Tensor::zeros({H});
  std::copy(dxh.data.begin(), dxh.data.begin() + I, out.dx.data.begin());
  std::copy(dxh.data.begin() + I, dxh.data.end(), out.dh_prev.data.begin());
  return out;
}

// --------------------------------------------------------------------------
// Softmax family
// --------------------------------------------------------------------------

Tensor softmax(const Tensor& logits) {
  if (logits.size() == 0) fail("softmax: empty input");
  if (!logits.all_finite()) fail("softmax: non-finite input");
  const double m = *std::max_element(logits.data.begin(), logits.data.end());
  Tensor out = Tensor::zeros(logits.shape);
  double sum = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    sum += out[i];
  }
  for (double& v : out.data) v /= sum;
  return out;
}

Tensor log_softmax(const Tensor& logits) {
  if (logits.size() == 0) fail("log_softmax: empty input");
  const double m = *std::max_element(logits.data.begin(), logits.data.end());
  double sum = 0;
  for (double v : logits.data) sum += std::exp(v - m);
  const double lse = m + std::log(sum);
  Tensor out = Tensor::zeros(logits.shape);
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

Tensor softmax_backward(const Tensor& probs, const Tensor& dprobs) {
  double dot = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) dot += dprobs[i] * probs[i];
  Tensor dx = Tensor::zeros(probs.shape);
  for (std::size_t i = 0; i < probs.size(); ++i)
    dx[i] = probs[i] * (dprobs[i] - dot);
  return dx;
}

Tensor log_softmax_backward(const Tensor& logps, const Tensor& dlogps) {
  double total = 0;
  for (double v : dlogps.data) total += v;
  Tensor dx = Tensor::zeros(logps.shape);
  for (std::size_t i = 0; i < logps.size(); ++i)
    dx[i] = dlogps[i] - std::exp(logps[i]) * total;
  return dx;
}

double cross_entropy(const Tensor& logits, std::size_t target, double weight,
                     Tensor* dlogits) {
  if (target >= logits.size())
    fail("cross_entropy: target ", target, " out of range ", logits.size());
  const Tensor logps = log_softmax(logits);
  const double loss = -weight * logps[target];
  if (dlogits) {
    *dlogits = Tensor::zeros(logits.shape);
    for (std::size_t i = 0; i < logits.size(); ++i)
      (*dlogits)[i] = weight * std::exp(logps[i]);
    (*dlogits)[target] -= weight;
  }
  return loss;
}

double clipped_surrogate(double logp_new, double logp_old, double advantage,
                         double clip_eps, double* dlogp_new) {
  const double ratio = std::exp(logp_new - logp_old);
  const double clipped =
      std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
  const double a = ratio * advantage;
  const double b = clipped * advantage;
  if (a <= b) {
    // Unclipped branch active (ties resolve here, keeping gradients flowing).
    if (dlogp_new) *dlogp_new = -ratio * advantage;
    return -a;
  }
  if (dlogp_new) *dlogp_new = 0.0;
  return -b;
}

// --------------------------------------------------------------------------
// Adam
// --------------------------------------------------------------------------

AdamOptimizer::AdamOptimizer(std::vector<Param*> params)
    : params_(std::move(params)) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const Param* p : params_) {
    m_.push_back(Tensor::zeros(p->value.shape));
    v_.push_back(Tensor::zeros(p->value.shape));
  }
}

void AdamOptimizer::step(double lr) {
  ++step_count;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
  for (std::size_t b = 0; b < params_.size(); ++b) {
    Param& p = *params_[b];
    if (!p.grad.all_finite())
      fail("adam_step: non-finite gradient in block '", p.name, "'");
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      m_[b][i] = beta1 * m_[b][i] + (1.0 - beta1) * g;
      v_[b][i] = beta2 * v_[b][i] + (1.0 - beta2) * g * g;
      const double mhat = m_[b][i] / bc1;
      const double vhat = v_[b][i] / bc2;
      p.value[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
    p.grad.zero();
  }
}

// --------------------------------------------------------------------------
// Checkpoints
// --------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'D', 'S', 'C', 'K'};
constexpr std::uint8_t kVersion = 1;

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) fail("checkpoint truncated");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

std::string take_str(const std::string& in, std::size_t& pos, std::size_t n) {
  if (pos + n > in.size()) fail("checkpoint truncated");
  std::string s = in.substr(pos, n);
  pos += n;
  return s;
}

}  // namespace

std::string serialize_checkpoint(const std::vector<const Param*>& params,
                                 const std::string& tag) {
  std::string out;
  out.append(kMagic, 4);
  put<std::uint8_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(tag.size()));
  out += tag;
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const Param* p : params) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p->name.size()));
    out += p->name;
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p->value.shape.size()));
    for (std::size_t d : p->value.shape) put<std::uint64_t>(out, d);
    const char* raw = reinterpret_cast<const char*>(p->value.data.data());
    out.append(raw, p->value.size() * sizeof(double));
  }
  return out;
}

void save_checkpoint(const std::vector<const Param*>& params,
                     const std::string& tag,
                     const std::filesystem::path& path) {
  atomic_write_file(path, serialize_checkpoint(params, tag));
}

namespace {

struct CheckpointHeader {
  std::string tag;
  std::uint32_t blocks = 0;
  std::size_t pos = 0;
};

CheckpointHeader read_header(const std::string& raw,
                             const std::filesystem::path& path) {
  std::size_t pos = 0;
  if (take_str(raw, pos, 4) != std::string(kMagic, 4))
    fail("not a checkpoint file: ", path.string());
  const auto version = take<std::uint8_t>(raw, pos);
  if (version != kVersion)
    fail("incompatible checkpoint version ", static_cast<int>(version),
         " (expected ", static_cast<int>(kVersion), "): ", path.string());
  CheckpointHeader h;
  const auto tag_len = take<std::uint32_t>(raw, pos);
  h.tag = take_str(raw, pos, tag_len);
  h.blocks = take<std::uint32_t>(raw, pos);
  h.pos = pos;
  return h;
}

}  // namespace

void load_checkpoint(std::vector<Param*> params, const std::string& tag,
                     const std::filesystem::path& path) {
  const std::string raw = read_file(path);
  CheckpointHeader h = read_header(raw, path);
  if (h.tag != tag)
    fail("checkpoint tag mismatch: expected '", tag, "', found '", h.tag,
         "' in ", path.string());
  if (h.blocks != params.size())
    fail("checkpoint block count mismatch: expected ", params.size(),
         ", found ", h.blocks, " in ", path.string());
  std::size_t pos = h.pos;
  for (Param* p : params) {
    const auto name_len = take<std::uint32_t>(raw, pos);
    const std::string name = take_str(raw, pos, name_len);
    if (name != p->name)
      fail("checkpoint block order mismatch: expected '", p->name,
           "', found '", name, "'");
    const auto ndim = take<std::uint32_t>(raw, pos);
    std::vector<std::size_t> shape(ndim);
    for (auto& d : shape)
      d = static_cast<std::size_t>(take<std::uint64_t>(raw, pos));
    if (shape != p->value.shape)
      fail("checkpoint shape mismatch for '", name, "'");
    const std::size_t bytes = p->value.size() * sizeof(double);
    if (pos + bytes > raw.size()) fail("checkpoint truncated");
    std::memcpy(p->value.data.data(), raw.data() + pos, bytes);
    pos += bytes;
  }
}

std::string checkpoint_tag(const std::filesystem::path& path) {
  return read_header(read_file(path), path).tag;
}

}  // namespace deepstage
