#include <cmath>
#include <cstdio>
#include <filesystem>

#include "deepstage/nn.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace deepstage;
using deepstage::test::finite_difference_check;
using deepstage::test::snapshot_grads;
using deepstage::test::zero_grads;

namespace {

DenseLayer make_dense(std::size_t out, std::size_t in, Activation act,
                      std::uint64_t seed) {
  DenseLayer l("d", out, in, act);
  Rng rng(seed);
  l.init_glorot(rng);
  return l;
}

}  // namespace

TEST_CASE("dense identity and zero-weight cases") {
  DenseLayer id("id", 2, 2, Activation::identity);
  id.weight.value.at(0, 0) = 1;
  id.weight.value.at(1, 1) = 1;
  const Tensor y = dense_forward(id, Tensor::vec({1, 2}));
  CHECK(y[0] == 1.0);
  CHECK(y[1] == 2.0);

  DenseLayer zero("z", 1, 3, Activation::identity);
  zero.bias.value[0] = 3;
  const Tensor y2 = dense_forward(zero, Tensor::vec({9, -4, 0.5}));
  CHECK(y2[0] == 3.0);
}

TEST_CASE("dense tanh single unit") {
  DenseLayer l("t", 1, 2, Activation::tanh_act);
  l.weight.value.at(0, 0) = 1;
  l.weight.value.at(0, 1) = 1;
  const Tensor y = dense_forward(l, Tensor::vec({0.5, 0.5}));
  CHECK(y[0] == doctest::Approx(std::tanh(1.0)).epsilon(1e-12));
  CHECK(y[0] == doctest::Approx(0.7615941559557649).epsilon(1e-12));
}

TEST_CASE("dense rejects shape mismatch naming both shapes") {
  DenseLayer l("m", 2, 3, Activation::identity);
  CHECK_THROWS_WITH_AS(dense_forward(l, Tensor::vec({1, 2})),
                       doctest::Contains("[2x3]"), std::runtime_error);
}

TEST_CASE("lstm zero parameters give zero state") {
  LstmCell cell("c", 3, 4);
  Tensor h, c;
  lstm_step(cell, Tensor::vec({5, -2, 1}), Tensor::zeros({4}),
            Tensor::zeros({4}), h, c);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(h[j] == 0.0);
    CHECK(c[j] == 0.0);
  }
}

TEST_CASE("lstm forget bias alone cannot create cell state") {
  LstmCell cell("c", 2, 2);
  std::fill(cell.b_f.value.data.begin(), cell.b_f.value.data.end(), 10.0);
  Tensor h, c;
  lstm_step(cell, Tensor::vec({1, 1}), Tensor::zeros({2}), Tensor::zeros({2}),
            h, c);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(std::fabs(c[j]) < 1e-15);
    CHECK(std::fabs(h[j]) < 1e-15);
  }
}

// Independent re-implementation of the LSTM recurrence, kept deliberately
// naive, as a double-entry oracle for the production code path.
namespace {
void reference_lstm(const LstmCell& cell, const std::vector<double>& x,
                    const std::vector<double>& hp, const std::vector<double>& cp,
                    std::vector<double>& h, std::vector<double>& c) {
  const std::size_t I = cell.input_dim, H = cell.hidden_dim;
  std::vector<double> xh(I + H);
  for (std::size_t i = 0; i < I; ++i) xh[i] = x[i];
  for (std::size_t i = 0; i < H; ++i) xh[I + i] = hp[i];
  auto dot = [&](const Tensor& w, const Tensor& b, std::size_t r) {
    double z = b[r];
    for (std::size_t k = 0; k < I + H; ++k) z += w.at(r, k) * xh[k];
    return z;
  };
  h.assign(H, 0);
  c.assign(H, 0);
  for (std::size_t r = 0; r < H; ++r) {
    const double i = 1.0 / (1.0 + std::exp(-dot(cell.w_i.value, cell.b_i.value, r)));
    const double f = 1.0 / (1.0 + std::exp(-dot(cell.w_f.value, cell.b_f.value, r)));
    const double o = 1.0 / (1.0 + std::exp(-dot(cell.w_o.value, cell.b_o.value, r)));
    const double g = std::tanh(dot(cell.w_g.value, cell.b_g.value, r));
    c[r] = f * cp[r] + i * g;
    h[r] = o * std::tanh(c[r]);
  }
}
}  // namespace

TEST_CASE("lstm matches independent reimplementation") {
  LstmCell cell("c", 5, 6);
  Rng rng(123);
  cell.init_glorot(rng);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(5), hp(6), cp(6);
    for (auto& v : x) v = rng.uniform(-2, 2);
    for (auto& v : hp) v = rng.uniform(-1, 1);
    for (auto& v : cp) v = rng.uniform(-1, 1);
    Tensor h, c;
    lstm_step(cell, Tensor::vec(x), Tensor::vec(hp), Tensor::vec(cp), h, c);
    std::vector<double> rh, rc;
    reference_lstm(cell, x, hp, cp, rh, rc);
    for (std::size_t j = 0; j < 6; ++j) {
      CHECK(h[j] == doctest::Approx(rh[j]).epsilon(1e-14));
      CHECK(c[j] == doctest::Approx(rc[j]).epsilon(1e-14));
    }
  }
}

TEST_CASE("softmax basics") {
  const Tensor uniform = softmax(Tensor::vec({0, 0, 0}));
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(uniform[i] == doctest::Approx(1.0 / 3).epsilon(1e-15));

  const Tensor big = softmax(Tensor::vec({1000, 0}));
  CHECK(big.all_finite());
  CHECK(big[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(big[1] == doctest::Approx(0.0).epsilon(1e-12));

  const Tensor hand = softmax(Tensor::vec({1, 2, 3}));
  CHECK(hand[0] == doctest::Approx(0.09003057317038046).epsilon(1e-10));
  CHECK(hand[1] == doctest::Approx(0.24472847105479767).epsilon(1e-10));
  CHECK(hand[2] == doctest::Approx(0.6652409557748219).epsilon(1e-10));

  CHECK_THROWS(softmax(Tensor::vec({})));
}

TEST_CASE("softmax sums to one and is shift invariant") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(7);
    for (auto& x : v) x = rng.uniform(-50, 50);
    const Tensor p = softmax(Tensor::vec(v));
    double sum = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(p[i] > 0.0);
      sum += p[i];
    }
    CHECK(std::fabs(sum - 1.0) <= 1e-12);

    const double shift = rng.uniform(-30, 30);
    std::vector<double> sv = v;
    for (auto& x : sv) x += shift;
    const Tensor ps = softmax(Tensor::vec(sv));
    for (std::size_t i = 0; i < p.size(); ++i)
      CHECK(ps[i] == doctest::Approx(p[i]).epsilon(1e-12));
  }
}

TEST_CASE("scalar square gradient") {
  // f(w) = w^2 realized as a 1x1 identity dense layer followed by squaring.
  DenseLayer l("w", 1, 1, Activation::identity);
  l.weight.value[0] = 3.0;
  DenseCache cache;
  const Tensor y = dense_forward(l, Tensor::vec({1.0}), &cache);
  const double dy = 2.0 * y[0];
  dense_backward(l, cache, Tensor::vec({dy}));
  CHECK(l.weight.grad[0] == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("cross entropy gradient equals softmax minus onehot") {
  const Tensor logits = Tensor::vec({0, 0, 0, 0});
  Tensor dlogits;
  const double loss = cross_entropy(logits, 2, 1.0, &dlogits);
  CHECK(loss == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  for (std::size_t i = 0; i < 4; ++i) {
    const double expected = (i == 2) ? 0.25 - 1.0 : 0.25;
    CHECK(dlogits[i] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("disconnected parameters keep zero gradient") {
  DenseLayer used("u", 2, 2, Activation::tanh_act);
  DenseLayer unused("x", 2, 2, Activation::tanh_act);
  Rng rng(5);
  used.init_glorot(rng);
  unused.init_glorot(rng);
  DenseCache cache;
  dense_forward(used, Tensor::vec({0.3, -0.7}), &cache);
  dense_backward(used, cache, Tensor::vec({1.0, 1.0}));
  for (std::size_t i = 0; i < unused.weight.grad.size(); ++i)
    CHECK(unused.weight.grad[i] == 0.0);
}

TEST_CASE("dense stack gradient matches finite differences") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    DenseLayer l1 = make_dense(4, 3, Activation::tanh_act, seed);
    DenseLayer l2 = make_dense(5, 4, Activation::relu, seed + 100);
    DenseLayer l3 = make_dense(3, 5, Activation::identity, seed + 200);
    Rng rng(seed + 300);
    std::vector<double> xv(3);
    for (auto& v : xv) v = rng.uniform(-1, 1);
    const Tensor x = Tensor::vec(xv);
    const std::size_t target = seed % 3;

    auto loss = [&]() {
      const Tensor h1 = dense_forward(l1, x);
      const Tensor h2 = dense_forward(l2, h1);
      const Tensor h3 = dense_forward(l3, h2);
      return cross_entropy(h3, target, 1.0);
    };

    std::vector<Param*> params;
    for (auto* p : l1.params()) params.push_back(p);
    for (auto* p : l2.params()) params.push_back(p);
    for (auto* p : l3.params()) params.push_back(p);
    zero_grads(params);

    DenseCache c1, c2, c3;
    const Tensor h1 = dense_forward(l1, x, &c1);
    const Tensor h2 = dense_forward(l2, h1, &c2);
    const Tensor h3 = dense_forward(l3, h2, &c3);
    Tensor dlogits;
    cross_entropy(h3, target, 1.0, &dlogits);
    const Tensor d2 = dense_backward(l3, c3, dlogits);
    const Tensor d1 = dense_backward(l2, c2, d2);
    dense_backward(l1, c1, d1);

    const auto res =
        finite_difference_check(params, loss, snapshot_grads(params));
    CAPTURE(res.worst_block);
    CAPTURE(res.worst_rel);
    CHECK(res.ok);
  }
}

TEST_CASE("lstm gradient matches finite differences over a short sequence") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    LstmCell cell("c", 3, 4);
    DenseLayer head = make_dense(2, 4, Activation::identity, seed + 40);
    Rng rng(seed);
    cell.init_glorot(rng);
    const int T = 4;
    std::vector<Tensor> xs;
    for (int t = 0; t < T; ++t) {
      std::vector<double> x(3);
      for (auto& v : x) v = rng.uniform(-1, 1);
      xs.push_back(Tensor::vec(x));
    }

    auto loss = [&]() {
      Tensor h = Tensor::zeros({4}), c = Tensor::zeros({4});
      double total = 0;
      for (int t = 0; t < T; ++t) {
        Tensor hn, cn;
        lstm_step(cell, xs[t], h, c, hn, cn);
        h = hn;
        c = cn;
        total += cross_entropy(dense_forward(head, h), t % 2, 1.0);
      }
      return total;
    };

    std::vector<Param*> params = cell.params();
    for (auto* p : head.params()) params.push_back(p);
    zero_grads(params);

    // Forward with caches, then backward through time.
    Tensor h = Tensor::zeros({4}), c = Tensor::zeros({4});
    std::vector<LstmCache> lcaches(T);
    std::vector<DenseCache> dcaches(T);
    std::vector<Tensor> dlogits(T);
    for (int t = 0; t < T; ++t) {
      Tensor hn, cn;
      lstm_step(cell, xs[t], h, c, hn, cn, &lcaches[t]);
      h = hn;
      c = cn;
      const Tensor out = dense_forward(head, h, &dcaches[t]);
      cross_entropy(out, t % 2, 1.0, &dlogits[t]);
    }
    Tensor dh = Tensor::zeros({4}), dc = Tensor::zeros({4});
    for (int t = T - 1; t >= 0; --t) {
      Tensor dh_local = dense_backward(head, dcaches[t], dlogits[t]);
      for (std::size_t j = 0; j < 4; ++j) dh[j] += dh_local[j];
      const LstmGrads g = lstm_backward(cell, lcaches[t], dh, dc);
      dh = g.dh_prev;
      dc = g.dc_prev;
    }

    const auto res =
        finite_difference_check(params, loss, snapshot_grads(params));
    CAPTURE(res.worst_block);
    CAPTURE(res.worst_rel);
    CHECK(res.ok);
  }
}

TEST_CASE("clipped surrogate branch values") {
  // ratio = 1.5, eps = 0.2, A = 1: objective min(1.5, 1.2) = 1.2.
  const double logp_old = std::log(0.2);
  const double logp_new = std::log(0.3);
  double d = 0;
  const double loss = clipped_surrogate(logp_new, logp_old, 1.0, 0.2, &d);
  CHECK(loss == doctest::Approx(-1.2).epsilon(1e-12));
  CHECK(d == 0.0);  // clipped branch: no gradient

  // ratio = 1 exactly: unclipped branch, gradient -A.
  const double loss2 = clipped_surrogate(-1.0, -1.0, 2.0, 0.2, &d);
  CHECK(loss2 == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(d == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("adam zero gradient leaves parameters unchanged") {
  DenseLayer l = make_dense(3, 3, Activation::identity, 9);
  const std::vector<double> before = l.weight.value.data;
  AdamOptimizer opt(l.params());
  opt.step(0.1);
  CHECK(l.weight.value.data == before);
}

TEST_CASE("adam first step is approximately lr for unit gradient") {
  Param p("scalar", Tensor::vec({0.0}));
  AdamOptimizer opt({&p});
  p.grad[0] = 1.0;
  opt.step(0.1);
  // mhat = 1, vhat = 1 -> step = lr / (1 + eps)
  CHECK(p.value[0] == doctest::Approx(-0.1).epsilon(1e-7));
}

TEST_CASE("adam rejects NaN gradients naming the block") {
  Param p("bad_block", Tensor::vec({0.0}));
  AdamOptimizer opt({&p});
  p.grad[0] = std::nan("");
  CHECK_THROWS_WITH_AS(opt.step(0.1), doctest::Contains("bad_block"),
                       std::runtime_error);
}

TEST_CASE("adam runs are bit-identical") {
  auto run = [](std::uint64_t seed) {
    DenseLayer l = make_dense(4, 4, Activation::tanh_act, seed);
    AdamOptimizer opt(l.params());
    Rng rng(seed + 1);
    for (int it = 0; it < 20; ++it) {
      std::vector<double> xv(4);
      for (auto& v : xv) v = rng.uniform(-1, 1);
      DenseCache cache;
      const Tensor y = dense_forward(l, Tensor::vec(xv), &cache);
      Tensor dlogits;
      cross_entropy(y, it % 4, 1.0, &dlogits);
      dense_backward(l, cache, dlogits);
      opt.step(1e-3);
    }
    return l.weight.value.data;
  };
  CHECK(run(12) == run(12));
}

TEST_CASE("no NaN or Inf on bounded inputs") {
  Rng rng(77);
  LstmCell cell("c", 4, 4);
  DenseLayer dense = make_dense(4, 4, Activation::relu, 6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(4);
    for (auto& x : v) x = rng.uniform(-50, 50);
    const Tensor x = Tensor::vec(v);
    CHECK(dense_forward(dense, x).all_finite());
    Tensor h, c;
    lstm_step(cell, x, Tensor::vec({rng.uniform(-50, 50), 0, 1, -1}),
              Tensor::vec({rng.uniform(-50, 50), 2, -2, 0}), h, c);
    CHECK(h.all_finite());
    CHECK(c.all_finite());
    CHECK(softmax(x).all_finite());
    CHECK(log_softmax(x).all_finite());
  }
}

TEST_CASE("checkpoint round trip is bit exact") {
  DenseLayer l = make_dense(7, 5, Activation::tanh_act, 2024);
  LstmCell cell("c", 3, 4);
  Rng rng(2025);
  cell.init_glorot(rng);
  // Use awkward values that stress formatting-based formats.
  l.weight.value[0] = 1.0 / 3.0;
  l.weight.value[1] = 1e-300;
  l.weight.value[2] = -0.0;

  std::vector<Param*> params = l.params();
  for (auto* p : cell.params()) params.push_back(p);
  std::vector<const Param*> cparams(params.begin(), params.end());

  const auto path = std::filesystem::temp_directory_path() / "ds_ckpt_test.bin";
  save_checkpoint(cparams, "test_model", path);

  const std::vector<double> w_before = l.weight.value.data;
  const std::vector<double> g_before = cell.w_f.value.data;
  for (Param* p : params) p->value.zero();
  load_checkpoint(params, "test_model", path);
  CHECK(l.weight.value.data == w_before);
  CHECK(cell.w_f.value.data == g_before);
  CHECK(std::signbit(l.weight.value[2]));

  CHECK_THROWS_WITH_AS(load_checkpoint(params, "other_model", path),
                       doctest::Contains("tag mismatch"), std::runtime_error);
  CHECK(checkpoint_tag(path) == "test_model");
  std::filesystem::remove(path);
}
