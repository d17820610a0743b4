#include "radioclass/cnn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "radioclass/errors.hpp"
#include "radioclass/rng.hpp"

namespace radioclass {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double bce_from_logit(double z, double y) {
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::fabs(z)));
}

void validate_spec(const CnnSpec& s) {
  if (s.kernel < 1 || s.conv1_filters < 1 || s.conv2_filters < 1 ||
      s.dense_units < 1 || s.conv1_rows() < 1 || s.conv1_cols() < 1 ||
      s.pool1_rows() < 1 || s.pool1_cols() < 1 || s.conv2_rows() < 1 ||
      s.conv2_cols() < 1 || s.pool2_rows() < 1 || s.pool2_cols() < 1)
    throw ConfigError("cnn spec collapses a layer to zero size");
}

// Activations saved during the forward pass; everything backward needs.
struct Tape {
  std::vector<double> conv1_pre;   // [f1][r1][c1]
  std::vector<double> pool1;       // [f1][p1r][p1c], post-relu
  std::vector<int> pool1_src;      // argmax index into the conv1 grid
  std::vector<double> conv2_pre;   // [f2][r2][c2]
  std::vector<double> pool2;       // [f2][p2r][p2c]
  std::vector<int> pool2_src;
  std::vector<double> dense_pre;   // [units]
  double logit = 0.0;
};

void conv_valid(const double* in, int in_ch, int in_r, int in_c,
                const double* w, const double* b, int out_ch, int k,
                double* out, int out_r, int out_c) {
  for (int f = 0; f < out_ch; ++f) {
    for (int y = 0; y < out_r; ++y) {
      for (int x = 0; x < out_c; ++x) {
        double acc = b[f];
        for (int c = 0; c < in_ch; ++c) {
          const double* in_plane = in + (c * in_r + y) * in_c + x;
          const double* wf = w + ((f * in_ch + c) * k) * k;
          for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
              acc += in_plane[i * in_c + j] * wf[i * k + j];
        }
        out[(f * out_r + y) * out_c + x] = acc;
      }
    }
  }
}

/// 2x2 stride-2 max over relu(pre); records the argmax source index.
void relu_maxpool(const double* pre, int ch, int in_r, int in_c, double* out,
                  int* src, int out_r, int out_c) {
  for (int c = 0; c < ch; ++c) {
    for (int y = 0; y < out_r; ++y) {
      for (int x = 0; x < out_c; ++x) {
        int best_idx = (c * in_r + 2 * y) * in_c + 2 * x;
        double best = pre[best_idx];
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) {
            const int idx = (c * in_r + 2 * y + i) * in_c + 2 * x + j;
            if (pre[idx] > best) {
              best = pre[idx];
              best_idx = idx;
            }
          }
        }
        const int o = (c * out_r + y) * out_c + x;
        out[o] = best > 0.0 ? best : 0.0;
        src[o] = best_idx;
      }
    }
  }
}

double forward(const CnnParams& p, const double* input, Tape& tape) {
  const CnnSpec& s = p.spec;
  tape.conv1_pre.assign(
      static_cast<size_t>(s.conv1_filters) * s.conv1_rows() * s.conv1_cols(),
      0.0);
  conv_valid(input, 1, s.in_rows, s.in_cols, p.conv1_w.data(),
             p.conv1_b.data(), s.conv1_filters, s.kernel,
             tape.conv1_pre.data(), s.conv1_rows(), s.conv1_cols());

  tape.pool1.assign(
      static_cast<size_t>(s.conv1_filters) * s.pool1_rows() * s.pool1_cols(),
      0.0);
  tape.pool1_src.assign(tape.pool1.size(), 0);
  relu_maxpool(tape.conv1_pre.data(), s.conv1_filters, s.conv1_rows(),
               s.conv1_cols(), tape.pool1.data(), tape.pool1_src.data(),
               s.pool1_rows(), s.pool1_cols());

  tape.conv2_pre.assign(
      static_cast<size_t>(s.conv2_filters) * s.conv2_rows() * s.conv2_cols(),
      0.0);
  conv_valid(tape.pool1.data(), s.conv1_filters, s.pool1_rows(),
             s.pool1_cols(), p.conv2_w.data(), p.conv2_b.data(),
             s.conv2_filters, s.kernel, tape.conv2_pre.data(), s.conv2_rows(),
             s.conv2_cols());

  tape.pool2.assign(static_cast<size_t>(s.flat_size()), 0.0);
  tape.pool2_src.assign(tape.pool2.size(), 0);
  relu_maxpool(tape.conv2_pre.data(), s.conv2_filters, s.conv2_rows(),
               s.conv2_cols(), tape.pool2.data(), tape.pool2_src.data(),
               s.pool2_rows(), s.pool2_cols());

  tape.dense_pre.assign(static_cast<size_t>(s.dense_units), 0.0);
  const int flat = s.flat_size();
  for (int u = 0; u < s.dense_units; ++u) {
    double acc = p.dense_b[u];
    const double* wu = p.dense_w.data() + static_cast<size_t>(u) * flat;
    for (int i = 0; i < flat; ++i) acc += wu[i] * tape.pool2[i];
    tape.dense_pre[u] = acc;
  }

  double z = p.out_b[0];
  for (int u = 0; u < s.dense_units; ++u)
    z += p.out_w[u] * std::max(tape.dense_pre[u], 0.0);
  tape.logit = z;
  return z;
}

/// Accumulates dLoss/dParams into g given dLoss/dlogit.
void backward(const CnnParams& p, const double* input, const Tape& tape,
              double dlogit, CnnGrads& g) {
  const CnnSpec& s = p.spec;
  const int flat = s.flat_size();

  std::vector<double> d_dense_pre(s.dense_units);
  for (int u = 0; u < s.dense_units; ++u) {
    const double act = std::max(tape.dense_pre[u], 0.0);
    g.out_w[u] += dlogit * act;
    d_dense_pre[u] =
        tape.dense_pre[u] > 0.0 ? dlogit * p.out_w[u] : 0.0;
  }
  g.out_b[0] += dlogit;

  std::vector<double> d_pool2(flat, 0.0);
  for (int u = 0; u < s.dense_units; ++u) {
    const double du = d_dense_pre[u];
    if (du == 0.0) continue;
    double* gw = g.dense_w.data() + static_cast<size_t>(u) * flat;
    const double* wu = p.dense_w.data() + static_cast<size_t>(u) * flat;
    for (int i = 0; i < flat; ++i) {
      gw[i] += du * tape.pool2[i];
      d_pool2[i] += du * wu[i];
    }
    g.dense_b[u] += du;
  }

  // unpool: gradient flows to the argmax cell, gated by its relu
  std::vector<double> d_conv2_pre(tape.conv2_pre.size(), 0.0);
  for (size_t o = 0; o < d_pool2.size(); ++o) {
    const int src = tape.pool2_src[o];
    if (tape.conv2_pre[src] > 0.0) d_conv2_pre[src] += d_pool2[o];
  }

  std::vector<double> d_pool1(tape.pool1.size(), 0.0);
  const int r2 = s.conv2_rows(), c2 = s.conv2_cols();
  const int p1r = s.pool1_rows(), p1c = s.pool1_cols();
  for (int f = 0; f < s.conv2_filters; ++f) {
    for (int y = 0; y < r2; ++y) {
      for (int x = 0; x < c2; ++x) {
        const double d = d_conv2_pre[(f * r2 + y) * c2 + x];
        if (d == 0.0) continue;
        g.conv2_b[f] += d;
        for (int c = 0; c < s.conv1_filters; ++c) {
          const double* in_plane = tape.pool1.data() + (c * p1r + y) * p1c + x;
          double* gw =
              g.conv2_w.data() + ((f * s.conv1_filters + c) * s.kernel) *
                                     static_cast<size_t>(s.kernel);
          const double* wf =
              p.conv2_w.data() + ((f * s.conv1_filters + c) * s.kernel) *
                                     static_cast<size_t>(s.kernel);
          double* dp = d_pool1.data() + (c * p1r + y) * p1c + x;
          for (int i = 0; i < s.kernel; ++i) {
            for (int j = 0; j < s.kernel; ++j) {
              gw[i * s.kernel + j] += d * in_plane[i * p1c + j];
              dp[i * p1c + j] += d * wf[i * s.kernel + j];
            }
          }
        }
      }
    }
  }

  std::vector<double> d_conv1_pre(tape.conv1_pre.size(), 0.0);
  for (size_t o = 0; o < d_pool1.size(); ++o) {
    const int src = tape.pool1_src[o];
    if (tape.conv1_pre[src] > 0.0) d_conv1_pre[src] += d_pool1[o];
  }

  const int r1 = s.conv1_rows(), c1 = s.conv1_cols();
  for (int f = 0; f < s.conv1_filters; ++f) {
    for (int y = 0; y < r1; ++y) {
      for (int x = 0; x < c1; ++x) {
        const double d = d_conv1_pre[(f * r1 + y) * c1 + x];
        if (d == 0.0) continue;
        g.conv1_b[f] += d;
        const double* in_plane = input + y * s.in_cols + x;
        double* gw =
            g.conv1_w.data() + (f * s.kernel) * static_cast<size_t>(s.kernel);
        for (int i = 0; i < s.kernel; ++i)
          for (int j = 0; j < s.kernel; ++j)
            gw[i * s.kernel + j] += d * in_plane[i * s.in_cols + j];
      }
    }
  }
}

}  // namespace

std::vector<std::pair<std::string, std::vector<double>*>>
CnnParams::tensors() {
  return {{"conv1_w", &conv1_w}, {"conv1_b", &conv1_b},
          {"conv2_w", &conv2_w}, {"conv2_b", &conv2_b},
          {"dense_w", &dense_w}, {"dense_b", &dense_b},
          {"out_w", &out_w},     {"out_b", &out_b}};
}

std::vector<std::pair<std::string, const std::vector<double>*>>
CnnParams::tensors() const {
  return {{"conv1_w", &conv1_w}, {"conv1_b", &conv1_b},
          {"conv2_w", &conv2_w}, {"conv2_b", &conv2_b},
          {"dense_w", &dense_w}, {"dense_b", &dense_b},
          {"out_w", &out_w},     {"out_b", &out_b}};
}

CnnParams make_cnn_params(const CnnSpec& spec) {
  validate_spec(spec);
  CnnParams p;
  p.spec = spec;
  const size_t k2 = static_cast<size_t>(spec.kernel) * spec.kernel;
  p.conv1_w.assign(spec.conv1_filters * k2, 0.0);
  p.conv1_b.assign(spec.conv1_filters, 0.0);
  p.conv2_w.assign(static_cast<size_t>(spec.conv2_filters) *
                       spec.conv1_filters * k2,
                   0.0);
  p.conv2_b.assign(spec.conv2_filters, 0.0);
  p.dense_w.assign(static_cast<size_t>(spec.dense_units) * spec.flat_size(),
                   0.0);
  p.dense_b.assign(spec.dense_units, 0.0);
  p.out_w.assign(spec.dense_units, 0.0);
  p.out_b.assign(1, 0.0);
  return p;
}

namespace {

void glorot_fill(std::vector<double>& w, int fan_in, int fan_out,
                 std::mt19937_64& rng) {
  const double a = std::sqrt(6.0 / (fan_in + fan_out));
  for (auto& v : w) v = a * (2.0 * uniform_unit(rng) - 1.0);
}

}  // namespace

CnnParams init_cnn_params(const CnnSpec& spec, uint64_t seed) {
  CnnParams p = make_cnn_params(spec);
  auto rng = make_rng(seed, "cnn/init");
  const int k2 = spec.kernel * spec.kernel;
  glorot_fill(p.conv1_w, 1 * k2, spec.conv1_filters * k2, rng);
  glorot_fill(p.conv2_w, spec.conv1_filters * k2, spec.conv2_filters * k2,
              rng);
  glorot_fill(p.dense_w, spec.flat_size(), spec.dense_units, rng);
  glorot_fill(p.out_w, spec.dense_units, 1, rng);
  return p;
}

double cnn_logit(const CnnParams& params, const FeatureVector& input) {
  const auto expect = static_cast<size_t>(params.spec.in_rows) *
                      params.spec.in_cols;
  if (input.size() != expect)
    throw ShapeMismatch("cnn input size " + std::to_string(input.size()) +
                        ", expected " + std::to_string(expect));
  Tape tape;
  return forward(params, input.data(), tape);
}

double cnn_forward(const CnnParams& params, const Spectrogram& spec) {
  if (spec.rows() != params.spec.in_rows ||
      spec.cols() != params.spec.in_cols)
    throw ShapeMismatch("cnn expects " + std::to_string(params.spec.in_rows) +
                        "x" + std::to_string(params.spec.in_cols) + ", got " +
                        std::to_string(spec.rows()) + "x" +
                        std::to_string(spec.cols()));
  return sigmoid(cnn_logit(params, flatten_spectrogram(spec)));
}

double cnn_batch_loss(const CnnParams& params,
                      const std::vector<FeatureVector>& inputs,
                      const LabelVector& y) {
  double loss = 0.0;
  for (size_t i = 0; i < inputs.size(); ++i)
    loss += bce_from_logit(cnn_logit(params, inputs[i]), y[i]);
  return loss / static_cast<double>(inputs.size());
}

CnnGrads cnn_batch_grads(const CnnParams& params,
                         const std::vector<FeatureVector>& inputs,
                         const LabelVector& y) {
  CnnGrads g = make_cnn_params(params.spec);
  Tape tape;
  const double scale = 1.0 / static_cast<double>(inputs.size());
  for (size_t i = 0; i < inputs.size(); ++i) {
    const double z = forward(params, inputs[i].data(), tape);
    backward(params, inputs[i].data(), tape, scale * (sigmoid(z) - y[i]), g);
  }
  return g;
}

Proba CnnModel::predict_proba(const FeatureVector& x) const {
  const double p = sigmoid(cnn_logit(params_, x));
  return Proba{1.0 - p, p};
}

CnnModel train_cnn(const std::vector<Spectrogram>& specs,
                   const LabelVector& y, const CnnSpec& spec,
                   const CnnHyper& hyper) {
  if (specs.size() < 2)
    throw EmptyTrainingSet("cnn needs at least two examples");
  if (specs.size() != y.size())
    throw DimensionMismatch("cnn examples vs labels");
  bool has0 = false, has1 = false;
  for (int label : y) (label == 1 ? has1 : has0) = true;
  if (!has0 || !has1)
    throw SingleClassTrainingSet("cnn training set has one class");

  std::vector<FeatureVector> inputs;
  inputs.reserve(specs.size());
  for (const auto& s : specs) {
    if (s.rows() != spec.in_rows || s.cols() != spec.in_cols)
      throw ShapeMismatch("spectrogram " + s.clip_id + " is " +
                          std::to_string(s.rows()) + "x" +
                          std::to_string(s.cols()));
    inputs.push_back(flatten_spectrogram(s));
  }

  CnnParams params = init_cnn_params(spec, hyper.seed);
  CnnParams m = make_cnn_params(spec);
  CnnParams v = make_cnn_params(spec);
  auto shuffle_rng = make_rng(hyper.seed, "cnn/shuffle");

  std::vector<int> order(inputs.size());
  std::iota(order.begin(), order.end(), 0);

  CnnModel model;
  long long step = 0;
  Tape tape;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    shuffle_inplace(order, shuffle_rng);
    double epoch_loss = 0.0;
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(hyper.batch)) {
      const size_t stop =
          std::min(order.size(), start + static_cast<size_t>(hyper.batch));
      const double scale = 1.0 / static_cast<double>(stop - start);

      CnnGrads g = make_cnn_params(spec);
      for (size_t r = start; r < stop; ++r) {
        const int i = order[r];
        const double z = forward(params, inputs[i].data(), tape);
        epoch_loss += bce_from_logit(z, y[i]);
        backward(params, inputs[i].data(), tape,
                 scale * (sigmoid(z) - y[i]), g);
      }

      ++step;
      const double bc1 = 1.0 - std::pow(hyper.beta1, double(step));
      const double bc2 = 1.0 - std::pow(hyper.beta2, double(step));
      auto pt = params.tensors();
      auto gt = g.tensors();
      auto mt = m.tensors();
      auto vt = v.tensors();
      for (size_t t = 0; t < pt.size(); ++t) {
        auto& pv = *pt[t].second;
        const auto& gv = *gt[t].second;
        auto& mv = *mt[t].second;
        auto& vv = *vt[t].second;
        for (size_t j = 0; j < pv.size(); ++j) {
          mv[j] = hyper.beta1 * mv[j] + (1.0 - hyper.beta1) * gv[j];
          vv[j] = hyper.beta2 * vv[j] + (1.0 - hyper.beta2) * gv[j] * gv[j];
          pv[j] -= hyper.lr * (mv[j] / bc1) /
                   (std::sqrt(vv[j] / bc2) + hyper.eps);
        }
      }
    }
    epoch_loss /= static_cast<double>(inputs.size());
    if (!std::isfinite(epoch_loss))
      throw NumericError("cnn loss non-finite at epoch " +
                         std::to_string(epoch));
    model.loss_trace().push_back(epoch_loss);
  }

  model.params() = std::move(params);
  model.train_meta().seed = hyper.seed;
  model.train_meta().epochs = hyper.epochs;
  model.train_meta().hyperparameters = {{"epochs", double(hyper.epochs)},
                                        {"batch", double(hyper.batch)},
                                        {"lr", hyper.lr}};
  return model;
}

}  // namespace radioclass
