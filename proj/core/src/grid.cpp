#include "radioclass/grid.hpp"

#include <memory>

#include "radioclass/audio_io.hpp"
#include "radioclass/errors.hpp"
#include "radioclass/rng.hpp"
#include "radioclass/textual.hpp"

namespace radioclass {

std::string to_string(PipelineKind p) {
  return p == PipelineKind::Textual ? "textual" : "spectral";
}

std::optional<PipelineKind> parse_pipeline(std::string_view text) {
  if (text == "textual") return PipelineKind::Textual;
  if (text == "spectral") return PipelineKind::Spectral;
  return std::nullopt;
}

std::string to_string(TradFeatures f) {
  return f == TradFeatures::Pooled ? "pooled" : "flattened";
}

std::optional<TradFeatures> parse_trad_features(std::string_view text) {
  if (text == "pooled") return TradFeatures::Pooled;
  if (text == "flattened") return TradFeatures::Flattened;
  return std::nullopt;
}

namespace {

std::shared_ptr<Model> train_traditional(ModelKind kind,
                                         const FeatureMatrix& X,
                                         const LabelVector& y,
                                         const GridOptions& opt) {
  switch (kind) {
    case ModelKind::LogReg:
      return std::make_shared<LogRegModel>(train_logreg(X, y, opt.logreg));
    case ModelKind::Svm:
      return std::make_shared<SvmModel>(train_svm(X, y, opt.svm));
    case ModelKind::Knn:
      return std::make_shared<KnnModel>(train_knn(X, y, opt.knn));
    case ModelKind::DTree:
      return std::make_shared<DTreeModel>(train_dtree(X, y, opt.dtree));
    case ModelKind::RForest: {
      RForestHyper hyper = opt.rforest;
      hyper.seed = opt.seed;
      return std::make_shared<RForestModel>(train_rforest(X, y, hyper));
    }
    case ModelKind::GBoost:
      return std::make_shared<GBoostModel>(train_gboost(X, y, opt.gboost));
    case ModelKind::Ensemble:
      return std::make_shared<EnsembleModel>(
          train_ensemble(X, y, opt.seed));
    default:
      throw ConfigError("model kind '" + to_string(kind) +
                        "' is not a feature-vector model");
  }
}

MetricsReport evaluate_scores(const std::string& model_name,
                              const std::string& pipeline_name,
                              const LabelVector& y_test,
                              const std::vector<double>& scores,
                              const GridOptions& opt) {
  LabelVector preds(scores.size());
  for (size_t i = 0; i < scores.size(); ++i)
    preds[i] = scores[i] > 0.5 ? 1 : 0;

  MetricsReport r;
  r.model = model_name;
  r.pipeline = pipeline_name;
  r.augmented = opt.augmented;
  r.seed = opt.seed;
  r.conf = confusion(y_test, preds);
  r.basic = basic_metrics(r.conf);
  r.auroc_value = auroc(y_test, scores);
  r.aupr_value = aupr(y_test, scores);
  return r;
}

}  // namespace

std::vector<MetricsReport> run_grid(
    const std::vector<AudioClip>& clips,
    const std::map<std::string, std::string>& transcripts,
    const GridOptions& opt) {
  if (clips.empty()) throw EmptyCorpus("grid over an empty corpus");

  LabelVector labels(clips.size());
  for (size_t i = 0; i < clips.size(); ++i) {
    if (!clips[i].label)
      throw IoError("clip without label: " + clips[i].id);
    labels[i] = static_cast<int>(*clips[i].label);
  }

  const SplitIndices split =
      train_test_split(labels, opt.train_frac, opt.seed);

  std::vector<AudioClip> train_clips, test_clips;
  std::vector<std::string> train_sources;
  for (int i : split.train) train_clips.push_back(clips[i]);
  for (int i : split.test) {
    AudioClip clip = clips[i];
    if (opt.test_noise > 0.0) {
      auto rng = make_rng(opt.seed ^ fnv1a64(clip.id), "grid/test-noise");
      clip = add_noise(clip, opt.test_noise, rng);
    }
    test_clips.push_back(std::move(clip));
  }

  if (opt.augmented) {
    AugmentConfig aug = opt.aug;
    aug.seed = opt.seed;
    AugmentedSet augmented = augment_dataset(train_clips, aug);
    train_clips = std::move(augmented.clips);
    train_sources = std::move(augmented.source_ids);
  } else {
    for (const auto& clip : train_clips) train_sources.push_back(clip.id);
  }

  const auto preprocess = [&](const AudioClip& clip) {
    AudioClip canonical = canonicalize(clip);
    if (opt.denoise) canonical = denoise(canonical, opt.denoise_cfg);
    return canonical;
  };

  LabelVector y_train, y_test;
  for (const auto& clip : train_clips)
    y_train.push_back(static_cast<int>(*clip.label));
  for (const auto& clip : test_clips)
    y_test.push_back(static_cast<int>(*clip.label));

  std::vector<MetricsReport> reports;
  for (PipelineKind pipeline : opt.pipelines) {
    const std::string pipeline_name = to_string(pipeline);

    FeatureMatrix X_train, X_test;
    std::vector<Spectrogram> spec_train, spec_test;

    if (pipeline == PipelineKind::Spectral) {
      for (const auto& clip : train_clips)
        spec_train.push_back(spectral_pipeline(preprocess(clip), opt.variant));
      for (const auto& clip : test_clips)
        spec_test.push_back(spectral_pipeline(preprocess(clip), opt.variant));
      const auto reduce = opt.trad_features == TradFeatures::Pooled
                              ? pool_spectrogram
                              : flatten_spectrogram;
      for (const auto& s : spec_train) X_train.push_back(reduce(s));
      for (const auto& s : spec_test) X_test.push_back(reduce(s));
    } else {
      std::vector<Transcript> docs;
      for (size_t i = 0; i < train_clips.size(); ++i) {
        auto it = transcripts.find(train_sources[i]);
        if (it == transcripts.end())
          throw MissingTranscript("no transcript for clip " +
                                  train_sources[i]);
        docs.push_back(make_transcript(train_clips[i].id, it->second));
      }
      const TfIdfModel tfidf = fit_tfidf(docs);
      for (const auto& doc : docs)
        X_train.push_back(transform_tfidf(doc, tfidf));
      for (const auto& clip : test_clips) {
        auto it = transcripts.find(clip.id);
        if (it == transcripts.end())
          throw MissingTranscript("no transcript for clip " + clip.id);
        X_test.push_back(transform_tfidf(
            make_transcript(clip.id, it->second), tfidf));
      }
    }

    for (ModelKind kind : opt.models) {
      auto model = train_traditional(kind, X_train, y_train, opt);
      std::vector<double> scores;
      scores.reserve(X_test.size());
      for (const auto& x : X_test)
        scores.push_back(model->predict_proba(x).takeoff);
      reports.push_back(evaluate_scores(to_string(kind), pipeline_name,
                                        y_test, scores, opt));
    }

    if (pipeline == PipelineKind::Spectral && opt.include_cnn) {
      CnnHyper hyper = opt.cnn;
      hyper.seed = opt.seed;
      const CnnModel cnn = train_cnn(spec_train, y_train, opt.cnn_spec,
                                     hyper);
      std::vector<double> scores;
      scores.reserve(spec_test.size());
      for (const auto& s : spec_test)
        scores.push_back(cnn_forward(cnn.params(), s));
      reports.push_back(evaluate_scores("cnn", pipeline_name, y_test,
                                        scores, opt));
    }
  }
  return reports;
}

std::vector<MetricsReport> run_ablation(
    const std::vector<AudioClip>& clips,
    const std::map<std::string, std::string>& transcripts,
    const GridOptions& base, const std::vector<uint64_t>& seeds) {
  std::vector<MetricsReport> reports;
  for (uint64_t seed : seeds) {
    for (bool augmented : {false, true}) {
      GridOptions opt = base;
      opt.seed = seed;
      opt.augmented = augmented;
      auto rows = run_grid(clips, transcripts, opt);
      reports.insert(reports.end(), rows.begin(), rows.end());
    }
  }
  return reports;
}

}  // namespace radioclass
