#ifndef DEEPSTAGE_NN_HPP_
#define DEEPSTAGE_NN_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "deepstage/rng.hpp"
#include "deepstage/tensor.hpp"

namespace deepstage {

constexpr double kNumericEps = 1e-8;

enum class Activation { identity, tanh_act, relu };

double sigmoid(double x);

// ---------------------------------------------------------------------------
// Dense layer: y = act(W x + b), W is [out x in].
// Forward fills an optional cache; backward consumes it, accumulates parameter
// gradients and returns the gradient w.r.t. the input.
// ---------------------------------------------------------------------------

struct DenseLayer {
  Param weight;  // [out, in]
  Param bias;    // [out]
  Activation act = Activation::identity;

  DenseLayer() = default;
  DenseLayer(std::string name, std::size_t out_dim, std::size_t in_dim,
             Activation act_in);

  std::size_t in_dim() const { return weight.value.cols(); }
  std::size_t out_dim() const { return weight.value.rows(); }

  void init_glorot(Rng& rng);
  std::vector<Param*> params();
};

struct DenseCache {
  Tensor input;
  Tensor output;  // post-activation; enough to form act'(z) for tanh/identity
  Tensor pre;     // pre-activation, needed for relu
};

Tensor dense_forward(const DenseLayer& layer, const Tensor& x,
                     DenseCache* cache = nullptr);
// Returns d(loss)/d(input); accumulates into layer.weight.grad / bias.grad.
Tensor dense_backward(DenseLayer& layer, const DenseCache& cache,
                      const Tensor& dy);

// ---------------------------------------------------------------------------
// LSTM cell with sigmoid gates and tanh candidate over concat(x, h_prev).
// ---------------------------------------------------------------------------

struct LstmCell {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  Param w_i, w_f, w_o, w_g;  // each [H, I+H]
  Param b_i, b_f, b_o, b_g;  // each [H]

  LstmCell() = default;
  LstmCell(std::string name, std::size_t input_dim_in,
           std::size_t hidden_dim_in);

  // Glorot on the gate matrices; forget-gate bias set to +1.
  void init_glorot(Rng& rng);
  std::vector<Param*> params();
};

struct LstmCache {
  Tensor xh;  // concat(x, h_prev)
  Tensor gate_i, gate_f, gate_o, gate_g;
  Tensor c_prev, c, tanh_c;
};

struct LstmGrads {
  Tensor dx;
  Tensor dh_prev;
  Tensor dc_prev;
};

void lstm_step(const LstmCell& cell, const Tensor& x, const Tensor& h_prev,
               const Tensor& c_prev, Tensor& h_out, Tensor& c_out,
               LstmCache* cache = nullptr);
LstmGrads lstm_backward(LstmCell& cell, const LstmCache& cache,
                        const Tensor& dh, const Tensor& dc);

// ---------------------------------------------------------------------------
// Softmax family (max-shifted, overflow-safe).
// ---------------------------------------------------------------------------

Tensor softmax(const Tensor& logits);
Tensor log_softmax(const Tensor& logits);
// Given d(loss)/d(softmax output) and the softmax output, gradient w.r.t. logits.
Tensor softmax_backward(const Tensor& probs, const Tensor& dprobs);
// Given d(loss)/d(log_softmax output), gradient w.r.t. logits.
Tensor log_softmax_backward(const Tensor& logps, const Tensor& dlogps);

// Weighted cross-entropy of softmax(logits) against a class index.
// Returns the loss; if dlogits is non-null, writes w * (softmax - onehot).
double cross_entropy(const Tensor& logits, std::size_t target, double weight,
                     Tensor* dlogits = nullptr);

// PPO clipped-surrogate term for one transition. Returns the per-transition
// loss -min(rho*A, clip(rho, 1-eps, 1+eps)*A) and, via dlogp_new, its
// derivative w.r.t. the new log-probability.
double clipped_surrogate(double logp_new, double logp_old, double advantage,
                         double clip_eps, double* dlogp_new = nullptr);

// ---------------------------------------------------------------------------
// Adam (bias-corrected). One optimizer owns the moments of every block it was
// built over; step() applies value -= lr * mhat / (sqrt(vhat) + eps).
// ---------------------------------------------------------------------------

struct AdamOptimizer {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = kNumericEps;
  std::int64_t step_count = 0;

  explicit AdamOptimizer(std::vector<Param*> params);
  // Applies one update from the accumulated gradients, then zeroes them.
  void step(double lr);

  std::vector<Param*> params_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
};

// ---------------------------------------------------------------------------
// Checkpoints: versioned binary container of named blocks, bit-exact on
// round trip. `tag` identifies the model kind ("encoder+estimator", ...).
// ---------------------------------------------------------------------------

std::string serialize_checkpoint(const std::vector<const Param*>& params,
                                 const std::string& tag);
void save_checkpoint(const std::vector<const Param*>& params,
                     const std::string& tag,
                     const std::filesystem::path& path);
// Blocks must match by name and shape; throws on version or tag mismatch.
void load_checkpoint(std::vector<Param*> params, const std::string& tag,
                     const std::filesystem::path& path);
std::string checkpoint_tag(const std::filesystem::path& path);

}  // namespace deepstage

#endif  // DEEPSTAGE_NN_HPP_
