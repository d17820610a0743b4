#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "radioclass/models.hpp"
#include "radioclass/spectral.hpp"
#include "radioclass/types.hpp"

namespace radioclass {

// Two valid-padded 3x3 conv+relu+2x2-maxpool blocks, then dense relu and a
// sigmoid head. Dimensions are parameters so the same code runs at full
// scale and at the miniature scale used for exhaustive gradient checks.
struct CnnSpec {
  int in_rows = kMelBands;
  int in_cols = kSpectrogramFrames;
  int conv1_filters = 8;
  int conv2_filters = 16;
  int kernel = 3;
  int dense_units = 32;

  int conv1_rows() const { return in_rows - kernel + 1; }
  int conv1_cols() const { return in_cols - kernel + 1; }
  int pool1_rows() const { return conv1_rows() / 2; }
  int pool1_cols() const { return conv1_cols() / 2; }
  int conv2_rows() const { return pool1_rows() - kernel + 1; }
  int conv2_cols() const { return pool1_cols() - kernel + 1; }
  int pool2_rows() const { return conv2_rows() / 2; }
  int pool2_cols() const { return conv2_cols() / 2; }
  int flat_size() const {
    return conv2_filters * pool2_rows() * pool2_cols();
  }
};

// lr is deliberately conservative: the dense layer sits on a large
// fan-in, and faster rates can push every relu unit negative early in
// training, freezing the network at the 0.5 saddle.
struct CnnHyper {
  int epochs = 8;
  int batch = 16;
  double lr = 0.0005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  uint64_t seed = 42;
};

// All tensors flat row-major: conv weights [out_ch][in_ch][k][k], dense
// weights [unit][input].
struct CnnParams {
  CnnSpec spec;
  std::vector<double> conv1_w, conv1_b;
  std::vector<double> conv2_w, conv2_b;
  std::vector<double> dense_w, dense_b;
  std::vector<double> out_w, out_b;

  /// Named views over every parameter tensor, in a fixed order.
  std::vector<std::pair<std::string, std::vector<double>*>> tensors();
  std::vector<std::pair<std::string, const std::vector<double>*>> tensors()
      const;
};

/// Zero-initialized parameters with the shapes spec demands.
CnnParams make_cnn_params(const CnnSpec& spec);

/// Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases, drawn
/// from the (seed, "cnn/init") stream.
CnnParams init_cnn_params(const CnnSpec& spec, uint64_t seed);

/// Logit of one flattened input (size in_rows*in_cols). ShapeMismatch on a
/// wrong size.
double cnn_logit(const CnnParams& params, const FeatureVector& input);

/// sigmoid(logit); accepts the 2D spectrogram directly.
double cnn_forward(const CnnParams& params, const Spectrogram& spec);

// Gradients have the same shapes as the parameters.
using CnnGrads = CnnParams;

/// Mean BCE loss over a batch of flattened inputs.
double cnn_batch_loss(const CnnParams& params,
                      const std::vector<FeatureVector>& inputs,
                      const LabelVector& y);

/// Analytic gradient of cnn_batch_loss with respect to every tensor.
CnnGrads cnn_batch_grads(const CnnParams& params,
                         const std::vector<FeatureVector>& inputs,
                         const LabelVector& y);

class CnnModel final : public Model {
 public:
  CnnModel() = default;
  explicit CnnModel(CnnParams params) : params_(std::move(params)) {}
  ModelKind kind() const override { return ModelKind::Cnn; }
  /// x is the flattened in_rows*in_cols spectrogram.
  Proba predict_proba(const FeatureVector& x) const override;

  const CnnParams& params() const { return params_; }
  CnnParams& params() { return params_; }
  const std::vector<double>& loss_trace() const { return loss_trace_; }
  std::vector<double>& loss_trace() { return loss_trace_; }

 private:
  CnnParams params_;
  std::vector<double> loss_trace_;
};

/// Mini-batch Adam on BCE; per-epoch shuffle and init both derive from
/// hyper.seed. Throws SingleClassTrainingSet, ShapeMismatch, NumericError
/// (non-finite loss, message carries the epoch index).
CnnModel train_cnn(const std::vector<Spectrogram>& specs,
                   const LabelVector& y, const CnnSpec& spec = {},
                   const CnnHyper& hyper = {});

}  // namespace radioclass
