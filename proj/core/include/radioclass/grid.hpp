#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "radioclass/augment.hpp"
#include "radioclass/cnn.hpp"
#include "radioclass/denoise.hpp"
#include "radioclass/eval.hpp"
#include "radioclass/models.hpp"
#include "radioclass/spectral.hpp"
#include "radioclass/types.hpp"

namespace radioclass {

enum class PipelineKind { Textual, Spectral };
std::string to_string(PipelineKind p);
std::optional<PipelineKind> parse_pipeline(std::string_view text);

// What the non-CNN models see from a spectrogram: 256-dim band mean/std
// pooling, or the raw 16,640 values.
enum class TradFeatures { Pooled, Flattened };
std::string to_string(TradFeatures f);
std::optional<TradFeatures> parse_trad_features(std::string_view text);

struct GridOptions {
  std::vector<ModelKind> models = {ModelKind::LogReg, ModelKind::Svm,
                                   ModelKind::Knn,    ModelKind::DTree,
                                   ModelKind::RForest, ModelKind::GBoost};
  bool include_cnn = true;
  std::vector<PipelineKind> pipelines = {PipelineKind::Textual,
                                         PipelineKind::Spectral};
  bool augmented = false;
  uint64_t seed = 42;
  double train_frac = 0.8;

  bool denoise = true;
  DenoiseConfig denoise_cfg;
  SpectralVariant variant = SpectralVariant::LogMel;
  TradFeatures trad_features = TradFeatures::Pooled;
  AugmentConfig aug;  // aug.seed is overridden by the grid seed

  // Gaussian perturbation of raw test clips, used by the ablation;
  // derived from (seed, clip id) only so paired cells share it exactly.
  double test_noise = 0.0;

  LogRegHyper logreg;
  SvmHyper svm;
  KnnHyper knn;
  DTreeHyper dtree;
  RForestHyper rforest;
  GBoostHyper gboost;
  CnnSpec cnn_spec;
  CnnHyper cnn;
};

/// One split per call, shared by every cell: split -> (augment train only)
/// -> featurize -> train -> evaluate on the untouched test partition.
/// transcripts maps clip id -> raw text and is only consulted for the
/// textual pipeline (augmented copies reuse their source's entry).
std::vector<MetricsReport> run_grid(
    const std::vector<AudioClip>& clips,
    const std::map<std::string, std::string>& transcripts,
    const GridOptions& opt);

/// Paired augmentation-off/on grids per seed, in seed-major order.
std::vector<MetricsReport> run_ablation(
    const std::vector<AudioClip>& clips,
    const std::map<std::string, std::string>& transcripts,
    const GridOptions& base, const std::vector<uint64_t>& seeds);

}  // namespace radioclass
