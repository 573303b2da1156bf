#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "typenet/common.hpp"
#include "typenet/vectorize.hpp"

namespace typenet::neural {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// A sequence batch, time-major: seq_len matrices of batch x dim.
template <typename T>
using SeqBatch = std::vector<Mat<T>>;

enum class Arch { A, B, C };

struct ModelConfig {
  Arch arch = Arch::A;
  int input_dim = 14;
  int seq_len = 55;
  int output_dim = 1001;
  // per-direction hidden sizes, recovered from the published totals
  int hidden_a = 14;
  int hidden_b = 10;
  int hidden_c = 128;
};

// lstm: 4*((input+hidden)*hidden + 2*hidden); gru: 3*(...). Two bias
// vectors per gate set.
int64_t gate_param_count(const std::string& kind, int input, int hidden);
int64_t param_count(const ModelConfig& config);
int default_epochs(Arch arch);
Arch arch_from_string(const std::string& name);
std::string arch_to_string(Arch arch);

namespace detail {

template <typename T>
Mat<T> sigmoid(const Mat<T>& x) {
  return x.unaryExpr([](T v) { return T(1) / (T(1) + std::exp(-v)); });
}

template <typename T>
Mat<T> tanh_m(const Mat<T>& x) {
  return x.unaryExpr([](T v) { return std::tanh(v); });
}

}  // namespace detail

template <typename T>
struct NamedParam {
  std::string name;
  Mat<T>* value;
  Mat<T>* grad;
};

template <typename T>
struct Linear {
  Mat<T> W, b;    // in x out, 1 x out
  Mat<T> gW, gb;
  Mat<T> x_cache;

  void init(int in, int out, Rng& rng) {
    T bound = T(1) / std::sqrt(T(in));
    W = random_uniform(in, out, bound, rng);
    b = random_uniform(1, out, bound, rng);
    zero_grads();
  }

  static Mat<T> random_uniform(int rows, int cols, T bound, Rng& rng) {
    Mat<T> m(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) m(r, c) = (T(2) * T(rng.uniform()) - T(1)) * bound;
    return m;
  }

  void zero_grads() {
    gW = Mat<T>::Zero(W.rows(), W.cols());
    gb = Mat<T>::Zero(1, b.cols());
  }

  Mat<T> forward(const Mat<T>& x) {
    x_cache = x;
    Mat<T> y = x * W;
    y.rowwise() += b.row(0);
    return y;
  }

  Mat<T> backward(const Mat<T>& dy) {
    gW += x_cache.transpose() * dy;
    gb += dy.colwise().sum();
    return dy * W.transpose();
  }

  void collect(std::vector<NamedParam<T>>& out, const std::string& prefix) {
    out.push_back({prefix + ".W", &W, &gW});
    out.push_back({prefix + ".b", &b, &gb});
  }
};

// Single-direction LSTM over a full sequence. Gate columns ordered
// [i f g o], each `hidden` wide.
template <typename T>
struct Lstm {
  int in = 0, hidden = 0;
  Mat<T> Wx, Wh, bx, bh;
  Mat<T> gWx, gWh, gbx, gbh;

  SeqBatch<T> xs, gi, gf, gg, go, cs, hs, tanh_cs;

  void init(int in_dim, int hidden_dim, Rng& rng) {
    in = in_dim;
    hidden = hidden_dim;
    T bound = T(1) / std::sqrt(T(hidden));
    Wx = Linear<T>::random_uniform(in, 4 * hidden, bound, rng);
    Wh = Linear<T>::random_uniform(hidden, 4 * hidden, bound, rng);
    bx = Linear<T>::random_uniform(1, 4 * hidden, bound, rng);
    bh = Linear<T>::random_uniform(1, 4 * hidden, bound, rng);
    zero_grads();
  }

  void zero_grads() {
    gWx = Mat<T>::Zero(in, 4 * hidden);
    gWh = Mat<T>::Zero(hidden, 4 * hidden);
    gbx = Mat<T>::Zero(1, 4 * hidden);
    gbh = Mat<T>::Zero(1, 4 * hidden);
  }

  // returns per-timestep hidden states (batch x hidden)
  const SeqBatch<T>& forward(const SeqBatch<T>& inputs) {
    const int steps = static_cast<int>(inputs.size());
    const auto batch = inputs[0].rows();
    xs = inputs;
    gi.assign(steps, {});
    gf.assign(steps, {});
    gg.assign(steps, {});
    go.assign(steps, {});
    cs.assign(steps, {});
    hs.assign(steps, {});
    tanh_cs.assign(steps, {});
    Mat<T> h = Mat<T>::Zero(batch, hidden);
    Mat<T> c = Mat<T>::Zero(batch, hidden);
    for (int t = 0; t < steps; ++t) {
      Mat<T> a = xs[t] * Wx + h * Wh;
      a.rowwise() += (bx + bh).row(0);
      gi[t] = detail::sigmoid<T>(a.leftCols(hidden));
      gf[t] = detail::sigmoid<T>(a.middleCols(hidden, hidden));
      gg[t] = detail::tanh_m<T>(a.middleCols(2 * hidden, hidden));
      go[t] = detail::sigmoid<T>(a.rightCols(hidden));
      Mat<T> c_prev = c;
      c = gf[t].cwiseProduct(c_prev) + gi[t].cwiseProduct(gg[t]);
      cs[t] = c;
      tanh_cs[t] = detail::tanh_m<T>(c);
      h = go[t].cwiseProduct(tanh_cs[t]);
      hs[t] = h;
    }
    return hs;
  }

  // dhs: per-timestep upstream gradient on h_t (empty matrices allowed for
  // zero). Returns per-timestep input gradients.
  SeqBatch<T> backward(const SeqBatch<T>& dhs) {
    const int steps = static_cast<int>(xs.size());
    const auto batch = xs[0].rows();
    Mat<T> dh_next = Mat<T>::Zero(batch, hidden);
    Mat<T> dc_next = Mat<T>::Zero(batch, hidden);
    SeqBatch<T> dxs(steps);
    for (int t = steps - 1; t >= 0; --t) {
      Mat<T> dh = dh_next;
      if (dhs[t].size() > 0) dh += dhs[t];
      Mat<T> dc = dc_next + dh.cwiseProduct(go[t]).cwiseProduct(
                                (T(1) - tanh_cs[t].array().square()).matrix());
      const Mat<T>& c_prev_m = (t > 0) ? cs[t - 1] : Mat<T>(Mat<T>::Zero(batch, hidden));
      Mat<T> da(batch, 4 * hidden);
      // d(pre-activation) per gate
      da.leftCols(hidden) = dc.cwiseProduct(gg[t]).cwiseProduct(gi[t]).cwiseProduct(
          (T(1) - gi[t].array()).matrix());
      da.middleCols(hidden, hidden) = dc.cwiseProduct(c_prev_m).cwiseProduct(gf[t]).cwiseProduct(
          (T(1) - gf[t].array()).matrix());
      da.middleCols(2 * hidden, hidden) =
          dc.cwiseProduct(gi[t]).cwiseProduct((T(1) - gg[t].array().square()).matrix());
      da.rightCols(hidden) = dh.cwiseProduct(tanh_cs[t]).cwiseProduct(go[t]).cwiseProduct(
          (T(1) - go[t].array()).matrix());

      gWx += xs[t].transpose() * da;
      if (t > 0) gWh += hs[t - 1].transpose() * da;
      Mat<T> col_sums = da.colwise().sum();
      gbx += col_sums;
      gbh += col_sums;
      dxs[t] = da * Wx.transpose();
      dh_next = da * Wh.transpose();
      dc_next = dc.cwiseProduct(gf[t]);
    }
    return dxs;
  }

  const Mat<T>& final_state() const { return hs.back(); }

  void collect(std::vector<NamedParam<T>>& out, const std::string& prefix) {
    out.push_back({prefix + ".Wx", &Wx, &gWx});
    out.push_back({prefix + ".Wh", &Wh, &gWh});
    out.push_back({prefix + ".bx", &bx, &gbx});
    out.push_back({prefix + ".bh", &bh, &gbh});
  }
};

// GRU with the reset gate applied to the hidden-to-candidate product, gate
// columns ordered [r z n].
template <typename T>
struct Gru {
  int in = 0, hidden = 0;
  Mat<T> Wx, Wh, bx, bh;
  Mat<T> gWx, gWh, gbx, gbh;

  SeqBatch<T> xs, rs, zs, ns, hs, hn_pres;

  void init(int in_dim, int hidden_dim, Rng& rng) {
    in = in_dim;
    hidden = hidden_dim;
    T bound = T(1) / std::sqrt(T(hidden));
    Wx = Linear<T>::random_uniform(in, 3 * hidden, bound, rng);
    Wh = Linear<T>::random_uniform(hidden, 3 * hidden, bound, rng);
    bx = Linear<T>::random_uniform(1, 3 * hidden, bound, rng);
    bh = Linear<T>::random_uniform(1, 3 * hidden, bound, rng);
    zero_grads();
  }

  void zero_grads() {
    gWx = Mat<T>::Zero(in, 3 * hidden);
    gWh = Mat<T>::Zero(hidden, 3 * hidden);
    gbx = Mat<T>::Zero(1, 3 * hidden);
    gbh = Mat<T>::Zero(1, 3 * hidden);
  }

  const SeqBatch<T>& forward(const SeqBatch<T>& inputs) {
    const int steps = static_cast<int>(inputs.size());
    const auto batch = inputs[0].rows();
    xs = inputs;
    rs.assign(steps, {});
    zs.assign(steps, {});
    ns.assign(steps, {});
    hs.assign(steps, {});
    hn_pres.assign(steps, {});
    Mat<T> h = Mat<T>::Zero(batch, hidden);
    for (int t = 0; t < steps; ++t) {
      Mat<T> ax = xs[t] * Wx;
      ax.rowwise() += bx.row(0);
      Mat<T> ah = h * Wh;
      ah.rowwise() += bh.row(0);
      rs[t] = detail::sigmoid<T>(Mat<T>(ax.leftCols(hidden) + ah.leftCols(hidden)));
      zs[t] = detail::sigmoid<T>(
          Mat<T>(ax.middleCols(hidden, hidden) + ah.middleCols(hidden, hidden)));
      hn_pres[t] = ah.rightCols(hidden);
      ns[t] = detail::tanh_m<T>(Mat<T>(ax.rightCols(hidden) + rs[t].cwiseProduct(hn_pres[t])));
      Mat<T> h_prev = h;
      h = (Mat<T>::Ones(batch, hidden) - zs[t]).cwiseProduct(ns[t]) + zs[t].cwiseProduct(h_prev);
      hs[t] = h;
    }
    return hs;
  }

  SeqBatch<T> backward(const SeqBatch<T>& dhs) {
    const int steps = static_cast<int>(xs.size());
    const auto batch = xs[0].rows();
    Mat<T> dh_next = Mat<T>::Zero(batch, hidden);
    SeqBatch<T> dxs(steps);
    for (int t = steps - 1; t >= 0; --t) {
      Mat<T> dh = dh_next;
      if (dhs[t].size() > 0) dh += dhs[t];
      const Mat<T>& h_prev = (t > 0) ? hs[t - 1] : Mat<T>(Mat<T>::Zero(batch, hidden));
      Mat<T> dn = dh.cwiseProduct((Mat<T>::Ones(batch, hidden) - zs[t]));
      Mat<T> dz = dh.cwiseProduct(h_prev - ns[t]);
      Mat<T> dh_prev = dh.cwiseProduct(zs[t]);

      Mat<T> da_n = dn.cwiseProduct((T(1) - ns[t].array().square()).matrix());
      Mat<T> dhn_pre = da_n.cwiseProduct(rs[t]);
      Mat<T> dr = da_n.cwiseProduct(hn_pres[t]);
      Mat<T> da_r = dr.cwiseProduct(rs[t]).cwiseProduct((T(1) - rs[t].array()).matrix());
      Mat<T> da_z = dz.cwiseProduct(zs[t]).cwiseProduct((T(1) - zs[t].array()).matrix());

      Mat<T> da_x(batch, 3 * hidden);
      da_x.leftCols(hidden) = da_r;
      da_x.middleCols(hidden, hidden) = da_z;
      da_x.rightCols(hidden) = da_n;
      Mat<T> da_h(batch, 3 * hidden);
      da_h.leftCols(hidden) = da_r;
      da_h.middleCols(hidden, hidden) = da_z;
      da_h.rightCols(hidden) = dhn_pre;

      gWx += xs[t].transpose() * da_x;
      gWh += h_prev.transpose() * da_h;
      gbx += da_x.colwise().sum();
      gbh += da_h.colwise().sum();
      dxs[t] = da_x * Wx.transpose();
      dh_prev += da_h * Wh.transpose();
      dh_next = dh_prev;
    }
    return dxs;
  }

  const Mat<T>& final_state() const { return hs.back(); }

  void collect(std::vector<NamedParam<T>>& out, const std::string& prefix) {
    out.push_back({prefix + ".Wx", &Wx, &gWx});
    out.push_back({prefix + ".Wh", &Wh, &gWh});
    out.push_back({prefix + ".bx", &bx, &gbx});
    out.push_back({prefix + ".bh", &bh, &gbh});
  }
};

// Forward and backward passes over the sequence; per-timestep outputs are
// the concatenation [h_fwd(t), h_bwd(t)], the final state concatenates the
// two directions' last processed states.
template <typename T>
struct BiLstm {
  Lstm<T> fwd, bwd;

  void init(int in_dim, int hidden_dim, Rng& rng) {
    fwd.init(in_dim, hidden_dim, rng);
    bwd.init(in_dim, hidden_dim, rng);
  }

  void zero_grads() {
    fwd.zero_grads();
    bwd.zero_grads();
  }

  SeqBatch<T> forward(const SeqBatch<T>& inputs) {
    const int steps = static_cast<int>(inputs.size());
    fwd.forward(inputs);
    SeqBatch<T> reversed(steps);
    for (int t = 0; t < steps; ++t) reversed[t] = inputs[steps - 1 - t];
    bwd.forward(reversed);
    SeqBatch<T> outputs(steps);
    for (int t = 0; t < steps; ++t) {
      outputs[t].resize(inputs[t].rows(), 2 * fwd.hidden);
      outputs[t].leftCols(fwd.hidden) = fwd.hs[t];
      outputs[t].rightCols(fwd.hidden) = bwd.hs[steps - 1 - t];
    }
    return outputs;
  }

  Mat<T> final_state() const {
    Mat<T> out(fwd.hs.back().rows(), 2 * fwd.hidden);
    out.leftCols(fwd.hidden) = fwd.final_state();
    out.rightCols(fwd.hidden) = bwd.final_state();
    return out;
  }

  // douts: per-timestep grads on the concatenated outputs (empty = zero);
  // dfinal: grad on final_state() (zero-size = none)
  SeqBatch<T> backward(const SeqBatch<T>& douts, const Mat<T>& dfinal) {
    const int steps = static_cast<int>(fwd.xs.size());
    const auto batch = fwd.xs[0].rows();
    SeqBatch<T> dh_fwd(steps), dh_bwd(steps);
    for (int t = 0; t < steps; ++t) {
      if (t < static_cast<int>(douts.size()) && douts[t].size() > 0) {
        dh_fwd[t] = douts[t].leftCols(fwd.hidden);
        dh_bwd[steps - 1 - t] = douts[t].rightCols(fwd.hidden);
      }
    }
    if (dfinal.size() > 0) {
      auto add = [&](Mat<T>& slot, const Mat<T>& g) {
        if (slot.size() == 0)
          slot = g;
        else
          slot += g;
      };
      add(dh_fwd[steps - 1], dfinal.leftCols(fwd.hidden));
      add(dh_bwd[steps - 1], dfinal.rightCols(fwd.hidden));
    }
    SeqBatch<T> dx_fwd = fwd.backward(dh_fwd);
    SeqBatch<T> dx_bwd_rev = bwd.backward(dh_bwd);
    SeqBatch<T> dxs(steps);
    for (int t = 0; t < steps; ++t) dxs[t] = dx_fwd[t] + dx_bwd_rev[steps - 1 - t];
    (void)batch;
    return dxs;
  }

  void collect(std::vector<NamedParam<T>>& out, const std::string& prefix) {
    fwd.collect(out, prefix + ".fwd");
    bwd.collect(out, prefix + ".bwd");
  }
};

template <typename T>
Mat<T> softmax(const Mat<T>& logits) {
  Mat<T> probs = logits;
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    T mx = probs.row(r).maxCoeff();
    probs.row(r) = (probs.row(r).array() - mx).exp();
    probs.row(r) /= probs.row(r).sum();
  }
  return probs;
}

template <typename T>
T cross_entropy(const Mat<T>& probs, const std::vector<uint32_t>& labels) {
  T loss = 0;
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    T p = probs(r, labels[r]);
    loss -= std::log(std::max(p, T(1e-12)));
  }
  return loss / T(probs.rows());
}

template <typename T>
Mat<T> softmax_ce_grad(const Mat<T>& probs, const std::vector<uint32_t>& labels) {
  Mat<T> dlogits = probs;
  T inv_batch = T(1) / T(probs.rows());
  for (Eigen::Index r = 0; r < probs.rows(); ++r) dlogits(r, labels[r]) -= T(1);
  return dlogits * inv_batch;
}

template <typename T>
class SequenceClassifier {
 public:
  SequenceClassifier() = default;

  SequenceClassifier(const ModelConfig& config, uint64_t init_seed) : config_(config) {
    Rng rng(init_seed);
    switch (config.arch) {
      case Arch::A:
        a1_.init(config.input_dim, config.hidden_a, rng);
        a2_.init(2 * config.hidden_a, config.hidden_a, rng);
        fc_.init(2 * config.hidden_a, config.output_dim, rng);
        break;
      case Arch::B:
        b1_.init(config.input_dim, config.hidden_b, rng);
        fc_.init(config.hidden_b, config.output_dim, rng);
        break;
      case Arch::C:
        c1_.init(config.input_dim, config.hidden_c, rng);
        fc_.init(2 * config.hidden_c, config.output_dim, rng);
        break;
    }
  }

  const ModelConfig& config() const { return config_; }

  // batch of sequences in, row-normalized probabilities out
  Mat<T> forward(const SeqBatch<T>& xs) {
    if (static_cast<int>(xs.size()) != config_.seq_len ||
        xs.empty() || xs[0].cols() != config_.input_dim)
      throw DataError("input shape does not match model config");
    Mat<T> features;
    switch (config_.arch) {
      case Arch::A: {
        SeqBatch<T> mid = a1_.forward(xs);
        a2_.forward(mid);
        features = a2_.final_state();
        break;
      }
      case Arch::B: {
        b1_.forward(xs);
        features = b1_.final_state();
        break;
      }
      case Arch::C: {
        c1_.forward(xs);
        features = c1_.final_state();
        break;
      }
    }
    return softmax<T>(fc_.forward(features));
  }

  // accumulates parameter gradients for the batch last forwarded
  void backward(const Mat<T>& probs, const std::vector<uint32_t>& labels) {
    Mat<T> dfeatures = fc_.backward(softmax_ce_grad<T>(probs, labels));
    const int steps = config_.seq_len;
    SeqBatch<T> no_douts(steps);
    switch (config_.arch) {
      case Arch::A: {
        SeqBatch<T> dmid = a2_.backward(no_douts, dfeatures);
        a1_.backward(dmid, Mat<T>());
        break;
      }
      case Arch::B: {
        SeqBatch<T> dhs(steps);
        dhs[steps - 1] = dfeatures;
        b1_.backward(dhs);
        break;
      }
      case Arch::C: {
        c1_.backward(no_douts, dfeatures);
        break;
      }
    }
  }

  void zero_grads() {
    a1_.zero_grads();
    a2_.zero_grads();
    b1_.zero_grads();
    c1_.zero_grads();
    fc_.zero_grads();
  }

  std::vector<NamedParam<T>> params() {
    std::vector<NamedParam<T>> out;
    switch (config_.arch) {
      case Arch::A:
        a1_.collect(out, "lstm1");
        a2_.collect(out, "lstm2");
        break;
      case Arch::B:
        b1_.collect(out, "gru");
        break;
      case Arch::C:
        c1_.collect(out, "lstm");
        break;
    }
    fc_.collect(out, "fc");
    return out;
  }

  int64_t actual_param_count() {
    int64_t total = 0;
    for (const auto& p : params()) total += p.value->size();
    return total;
  }

 private:
  ModelConfig config_;
  BiLstm<T> a1_, a2_;
  Gru<T> b1_;
  BiLstm<T> c1_;
  Linear<T> fc_;
};

template <typename T>
struct Adam {
  T lr = T(1e-3);
  T beta1 = T(0.9);
  T beta2 = T(0.999);
  T eps = T(1e-8);
  int64_t t = 0;
  std::vector<Mat<T>> m, v;

  void step(std::vector<NamedParam<T>>& params) {
    if (m.empty()) {
      for (auto& p : params) {
        m.push_back(Mat<T>::Zero(p.value->rows(), p.value->cols()));
        v.push_back(Mat<T>::Zero(p.value->rows(), p.value->cols()));
      }
    }
    ++t;
    T bc1 = T(1) - std::pow(beta1, T(t));
    T bc2 = T(1) - std::pow(beta2, T(t));
    for (size_t i = 0; i < params.size(); ++i) {
      const Mat<T>& g = *params[i].grad;
      m[i] = beta1 * m[i] + (T(1) - beta1) * g;
      v[i] = beta2 * v[i] + (T(1) - beta2) * g.cwiseProduct(g);
      auto m_hat = (m[i] / bc1).array();
      auto v_hat = (v[i] / bc2).array();
      params[i].value->array() -= lr * m_hat / (v_hat.sqrt() + eps);
    }
  }
};

struct TrainConfig {
  int epochs = 100;
  int batch_size = 256;
  float learning_rate = 1e-3f;
  uint64_t seed = 1;
};

struct TrainedModel {
  SequenceClassifier<float> classifier;
  uint64_t vocab_hash = 0;
  uint64_t seed = 0;
  std::vector<double> epoch_losses;
};

// Packs dataset tensors (each seq_len x input_dim) into a time-major batch.
SeqBatch<float> pack_batch(const std::vector<vectorize::Matrix>& tensors,
                           const std::vector<size_t>& indices);

TrainedModel train(const ModelConfig& model_config, const TrainConfig& train_config,
                   const std::vector<vectorize::Matrix>& tensors,
                   const std::vector<uint32_t>& labels, uint64_t vocab_hash);

// forward over a dataset in fixed-size chunks; rows are probabilities
Mat<float> predict_probs(SequenceClassifier<float>& model,
                         const std::vector<vectorize::Matrix>& tensors, int batch_size = 256);

struct Prediction {
  std::string type;
  float probability;
};

// k highest-probability classes; ties broken by vocabulary index
std::vector<Prediction> predict_top_k(const Mat<float>& probs, Eigen::Index row, int k,
                                      const vectorize::TypeVocabulary& vocab);

void save_checkpoint(const std::string& path, TrainedModel& model);
TrainedModel load_checkpoint(const std::string& path, uint64_t expected_vocab_hash);

}  // namespace typenet::neural
