#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "radioclass/audio_io.hpp"
#include "radioclass/augment.hpp"
#include "radioclass/cnn.hpp"
#include "radioclass/corpus.hpp"
#include "radioclass/datagen.hpp"
#include "radioclass/denoise.hpp"
#include "radioclass/errors.hpp"
#include "radioclass/eval.hpp"
#include "radioclass/grid.hpp"
#include "radioclass/model_io.hpp"
#include "radioclass/models.hpp"
#include "radioclass/spectral.hpp"
#include "radioclass/textual.hpp"

namespace rc = radioclass;
namespace fs = std::filesystem;

namespace {

/// JSON config files for CLI11: top-level keys are global options,
/// nested objects are subcommand scopes. Flags given on the command line
/// win over config values.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool,
                        std::string) const override {
    return "{}\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(input);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::FileError(std::string("config parse: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    flatten(j, {}, items);
    return items;
  }

 private:
  static void flatten(const nlohmann::json& j,
                      std::vector<std::string> parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto next = parents;
        next.push_back(key);
        flatten(value, next, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& elem : value) item.inputs.push_back(scalar(elem));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }

  static std::string scalar(const nlohmann::json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
    return value.dump();
  }
};

// Options shared by featurize/train/evaluate/ablate.
struct FeatureFlags {
  bool denoise = true;
  int noise_frames = 5;
  int smooth_width = 3;
  std::string variant = "log-mel";
  std::string trad_features = "pooled";
};

struct AsrFlags {
  std::string provider = "sidecar";
  std::string endpoint;
  int timeout_ms = 5000;
};

struct AugmentFlags {
  double stretch = 1.1;
  double noise = 0.005;
  double shift = 0.10;
  bool no_stretch = false;
  bool no_noise = false;
  bool no_shift = false;
};

struct HyperFlags {
  rc::LogRegHyper logreg;
  rc::SvmHyper svm;
  rc::KnnHyper knn;
  rc::DTreeHyper dtree;
  rc::RForestHyper rforest;
  rc::GBoostHyper gboost;
  rc::CnnHyper cnn;
};

void add_feature_flags(CLI::App* cmd, FeatureFlags& f) {
  cmd->add_flag("--denoise,!--no-denoise", f.denoise,
                "Spectral-subtraction denoising before features");
  cmd->add_option("--noise-frames", f.noise_frames,
                  "Leading frames used for the noise profile")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--smooth-width", f.smooth_width,
                  "Temporal smoothing width (odd)");
  cmd->add_option("--variant", f.variant, "Spectral variant")
      ->check(CLI::IsMember({"mel", "log-mel"}));
  cmd->add_option("--spectral-traditional-features", f.trad_features,
                  "Spectral features for non-CNN models")
      ->check(CLI::IsMember({"pooled", "flattened"}));
}

void add_asr_flags(CLI::App* cmd, AsrFlags& a) {
  cmd->add_option("--asr", a.provider, "Transcript source")
      ->check(CLI::IsMember({"sidecar", "http"}));
  cmd->add_option("--asr-endpoint", a.endpoint,
                  "HTTP ASR endpoint (POST audio/wav -> {\"transcript\"})")
      ->envname("RADIOCLASS_ASR_ENDPOINT");
  cmd->add_option("--asr-timeout-ms", a.timeout_ms, "HTTP ASR timeout");
}

void add_augment_flags(CLI::App* cmd, AugmentFlags& a) {
  cmd->add_option("--stretch", a.stretch, "Time-stretch factor");
  cmd->add_option("--noise", a.noise, "Gaussian noise factor");
  cmd->add_option("--shift", a.shift, "Max temporal shift fraction");
  cmd->add_flag("--no-stretch", a.no_stretch, "Disable time stretch");
  cmd->add_flag("--no-noise", a.no_noise, "Disable noise injection");
  cmd->add_flag("--no-shift", a.no_shift, "Disable temporal shift");
}

void add_hyper_flags(CLI::App* cmd, HyperFlags& h) {
  cmd->add_option("--logreg-lr", h.logreg.lr, "");
  cmd->add_option("--logreg-epochs", h.logreg.epochs, "");
  cmd->add_option("--logreg-l2", h.logreg.l2, "");
  cmd->add_option("--svm-lr", h.svm.lr, "");
  cmd->add_option("--svm-epochs", h.svm.epochs, "");
  cmd->add_option("--svm-c", h.svm.C, "");
  cmd->add_option("--knn-k", h.knn.k, "");
  cmd->add_option("--dtree-depth", h.dtree.max_depth, "");
  cmd->add_option("--rf-trees", h.rforest.n_trees, "");
  cmd->add_option("--rf-depth", h.rforest.max_depth, "");
  cmd->add_option("--gb-rounds", h.gboost.n_rounds, "");
  cmd->add_option("--gb-lr", h.gboost.lr, "");
  cmd->add_option("--gb-depth", h.gboost.depth, "");
  cmd->add_option("--cnn-epochs", h.cnn.epochs, "");
  cmd->add_option("--cnn-batch", h.cnn.batch, "");
  cmd->add_option("--cnn-lr", h.cnn.lr, "");
}

rc::AugmentConfig make_augment_config(const AugmentFlags& a, uint64_t seed) {
  rc::AugmentConfig cfg;
  cfg.stretch_factor = a.stretch;
  cfg.noise_factor = a.noise;
  cfg.max_shift_frac = a.shift;
  cfg.seed = seed;
  cfg.stretch_enabled = !a.no_stretch;
  cfg.noise_enabled = !a.no_noise;
  cfg.shift_enabled = !a.no_shift;
  return cfg;
}

std::unique_ptr<rc::AsrProvider> make_provider(const AsrFlags& a,
                                               const fs::path& corpus_dir) {
  if (a.provider == "http" || !a.endpoint.empty()) {
    if (a.endpoint.empty())
      throw rc::ConfigError(
          "--asr http needs --asr-endpoint or RADIOCLASS_ASR_ENDPOINT");
    return std::make_unique<rc::HttpAsr>(a.endpoint, a.timeout_ms);
  }
  return std::make_unique<rc::SidecarAsr>(corpus_dir);
}

/// id -> transcript for every corpus entry. Missing transcripts either
/// throw (strict) or are reported in missing_out.
std::map<std::string, std::string> gather_transcripts(
    const rc::CorpusIndex& index, rc::AsrProvider& provider, bool strict,
    std::vector<std::string>* missing_out) {
  std::map<std::string, std::string> transcripts;
  for (const auto& entry : index.entries) {
    try {
      rc::AudioClip clip;
      clip.id = entry.id;
      if (dynamic_cast<rc::HttpAsr*>(&provider) != nullptr)
        clip = rc::load_clip(entry);
      transcripts[entry.id] = provider.transcript_text(clip);
    } catch (const rc::MissingTranscript&) {
      if (strict) throw;
      if (missing_out) missing_out->push_back(entry.id);
    }
  }
  return transcripts;
}

rc::GridOptions make_grid_options(const FeatureFlags& f, const AugmentFlags& a,
                                  const HyperFlags& h, uint64_t seed) {
  rc::GridOptions opt;
  opt.seed = seed;
  opt.denoise = f.denoise;
  opt.denoise_cfg.noise_frames = f.noise_frames;
  opt.denoise_cfg.smooth_width = f.smooth_width;
  opt.variant = rc::parse_spectral_variant(f.variant);
  opt.trad_features = *rc::parse_trad_features(f.trad_features);
  opt.aug = make_augment_config(a, seed);
  opt.logreg = h.logreg;
  opt.svm = h.svm;
  opt.knn = h.knn;
  opt.dtree = h.dtree;
  opt.rforest = h.rforest;
  opt.gboost = h.gboost;
  opt.cnn = h.cnn;
  return opt;
}

void print_report_table(const std::vector<rc::MetricsReport>& reports) {
  std::printf("%-9s %-9s %-5s %7s %7s %7s %7s %7s %7s %7s\n", "model",
              "pipeline", "aug", "acc", "prec", "rec", "f1", "mcc", "auroc",
              "aupr");
  for (const auto& r : reports)
    std::printf("%-9s %-9s %-5s %7.4f %7.4f %7.4f %7.4f %7.4f %7.4f %7.4f\n",
                r.model.c_str(), r.pipeline.c_str(),
                r.augmented ? "on" : "off", r.basic.accuracy,
                r.basic.precision, r.basic.recall, r.basic.f1, r.basic.mcc,
                r.auroc_value, r.aupr_value);
}

rc::AudioClip preprocess_clip(const rc::AudioClip& clip,
                              const FeatureFlags& f) {
  rc::AudioClip canonical = rc::canonicalize(clip);
  if (f.denoise) {
    rc::DenoiseConfig cfg;
    cfg.noise_frames = f.noise_frames;
    cfg.smooth_width = f.smooth_width;
    canonical = rc::denoise(canonical, cfg);
  }
  return canonical;
}

int cmd_datagen(int n, double balance, uint64_t seed, double noise_level,
                const std::string& out) {
  rc::SynthSpec spec;
  spec.n_clips = n;
  spec.class_balance = balance;
  spec.seed = seed;
  spec.noise_level = noise_level;
  rc::generate_corpus(spec, out);
  const auto n_landing = static_cast<int>(std::llround(balance * n));
  std::printf("wrote %d clips (%d landing / %d takeoff) to %s (seed %llu)\n",
              n, n_landing, n - n_landing, out.c_str(),
              static_cast<unsigned long long>(seed));
  return 0;
}

int cmd_featurize(const std::string& corpus, const std::string& out,
                  const std::string& pipeline, const FeatureFlags& f,
                  const AsrFlags& asr, bool strict, uint64_t seed) {
  const auto index = rc::load_corpus_index(corpus);
  fs::create_directories(out);

  if (pipeline == "spectral" || pipeline == "both") {
    const auto variant = rc::parse_spectral_variant(f.variant);
    int count = 0;
    for (const auto& entry : index.entries) {
      const auto clip = preprocess_clip(rc::load_clip(entry), f);
      const auto spec = rc::spectral_pipeline(clip, variant);
      rc::write_mels_file(fs::path(out) / (entry.id + ".mels"), spec);
      ++count;
    }
    std::printf("spectral: wrote %d MELS files to %s (seed %llu)\n", count,
                out.c_str(), static_cast<unsigned long long>(seed));
  }

  if (pipeline == "textual" || pipeline == "both") {
    auto provider = make_provider(asr, corpus);
    std::vector<std::string> missing;
    const auto transcripts =
        gather_transcripts(index, *provider, strict, &missing);
    for (const auto& id : missing)
      std::fprintf(stderr, "warning: missing transcript for %s\n",
                   id.c_str());
    if (transcripts.empty())
      throw rc::EmptyCorpus("no transcripts available for " + corpus);

    std::vector<rc::Transcript> docs;
    for (const auto& [id, text] : transcripts)
      docs.push_back(rc::make_transcript(id, text));
    const auto tfidf = rc::fit_tfidf(docs);
    rc::save_tfidf(fs::path(out) / "tfidf_model.json", tfidf);

    nlohmann::json vectors = nlohmann::json::object();
    for (const auto& doc : docs)
      vectors[doc.clip_id] = rc::transform_tfidf(doc, tfidf);
    std::ofstream vec_out(fs::path(out) / "tfidf_vectors.json",
                          std::ios::binary);
    vec_out << vectors.dump(2) << '\n';
    if (!vec_out) throw rc::IoError("write failed: tfidf_vectors.json");

    std::printf(
        "textual: %zu vectors (%zu missing), vocabulary %d, to %s (seed "
        "%llu)\n",
        transcripts.size(), missing.size(), tfidf.dim(), out.c_str(),
        static_cast<unsigned long long>(seed));
  }
  return 0;
}

int cmd_augment(const std::string& corpus, const std::string& out,
                const AugmentFlags& flags, uint64_t seed) {
  const auto index = rc::load_corpus_index(corpus);
  const auto cfg = make_augment_config(flags, seed);
  fs::create_directories(out);

  std::map<std::string, std::string> transcripts;
  for (const auto& entry : index.entries) {
    if (!entry.has_transcript()) continue;
    std::ifstream in(entry.txt_path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    transcripts[entry.id] = buf.str();
  }

  std::vector<rc::CorpusEntry> out_entries;
  int written = 0;
  for (const auto& entry : index.entries) {
    const auto clip = rc::load_clip(entry);
    const auto augmented = rc::augment_dataset({clip}, cfg);
    for (size_t i = 0; i < augmented.clips.size(); ++i) {
      const auto& copy = augmented.clips[i];
      rc::write_wav16(fs::path(out) / (copy.id + ".wav"), copy);
      auto t = transcripts.find(augmented.source_ids[i]);
      if (t != transcripts.end()) {
        std::ofstream txt(fs::path(out) / (copy.id + ".txt"),
                          std::ios::binary);
        txt << t->second;
      }
      rc::CorpusEntry out_entry;
      out_entry.id = copy.id;
      out_entry.label = *copy.label;
      out_entries.push_back(std::move(out_entry));
      ++written;
    }
  }
  rc::write_labels_csv(out, out_entries);
  std::printf("wrote %d clips (from %zu sources) to %s (seed %llu)\n",
              written, index.entries.size(), out.c_str(),
              static_cast<unsigned long long>(seed));
  return 0;
}

int cmd_train(const std::string& corpus, const std::string& model_name,
              const std::string& pipeline, const std::string& out,
              const FeatureFlags& f, const AsrFlags& asr,
              const HyperFlags& h, uint64_t seed) {
  const auto kind = rc::parse_model_kind(model_name);
  if (!kind) throw rc::ConfigError("unknown model: " + model_name);
  const auto pipe = rc::parse_pipeline(pipeline);
  if (!pipe) throw rc::ConfigError("unknown pipeline: " + pipeline);
  if (*kind == rc::ModelKind::Cnn && *pipe != rc::PipelineKind::Spectral)
    throw rc::ConfigError("cnn runs on the spectral pipeline only");

  const auto index = rc::load_corpus_index(corpus);
  const auto clips = rc::load_clips(index);
  rc::LabelVector y;
  for (const auto& clip : clips) y.push_back(static_cast<int>(*clip.label));

  const auto opt = make_grid_options(f, {}, h, seed);

  if (*kind == rc::ModelKind::Cnn) {
    std::vector<rc::Spectrogram> specs;
    for (const auto& clip : clips)
      specs.push_back(
          rc::spectral_pipeline(preprocess_clip(clip, f), opt.variant));
    rc::CnnHyper hyper = h.cnn;
    hyper.seed = seed;
    const auto model = rc::train_cnn(specs, y, rc::CnnSpec{}, hyper);
    rc::save_model(out, model, rc::FeatureSpace::Spectrogram2d);
    std::printf("trained cnn on %zu clips, final loss %.4f -> %s (seed "
                "%llu)\n",
                clips.size(), model.loss_trace().back(), out.c_str(),
                static_cast<unsigned long long>(seed));
    return 0;
  }

  rc::FeatureMatrix X;
  rc::FeatureSpace space;
  if (*pipe == rc::PipelineKind::Spectral) {
    space = rc::FeatureSpace::PooledSpectral;
    for (const auto& clip : clips) {
      const auto spec =
          rc::spectral_pipeline(preprocess_clip(clip, f), opt.variant);
      X.push_back(opt.trad_features == rc::TradFeatures::Pooled
                      ? rc::pool_spectrogram(spec)
                      : rc::flatten_spectrogram(spec));
    }
  } else {
    space = rc::FeatureSpace::TfIdf;
    auto provider = make_provider(asr, corpus);
    const auto transcripts = gather_transcripts(index, *provider, true,
                                                nullptr);
    std::vector<rc::Transcript> docs;
    for (const auto& clip : clips)
      docs.push_back(rc::make_transcript(clip.id, transcripts.at(clip.id)));
    const auto tfidf = rc::fit_tfidf(docs);
    rc::save_tfidf(out + ".tfidf.json", tfidf);
    for (const auto& doc : docs) X.push_back(rc::transform_tfidf(doc, tfidf));
  }

  std::shared_ptr<rc::Model> model;
  switch (*kind) {
    case rc::ModelKind::LogReg:
      model = std::make_shared<rc::LogRegModel>(rc::train_logreg(X, y,
                                                                 h.logreg));
      break;
    case rc::ModelKind::Svm:
      model = std::make_shared<rc::SvmModel>(rc::train_svm(X, y, h.svm));
      break;
    case rc::ModelKind::Knn:
      model = std::make_shared<rc::KnnModel>(rc::train_knn(X, y, h.knn));
      break;
    case rc::ModelKind::DTree:
      model = std::make_shared<rc::DTreeModel>(rc::train_dtree(X, y,
                                                               h.dtree));
      break;
    case rc::ModelKind::RForest: {
      rc::RForestHyper hyper = h.rforest;
      hyper.seed = seed;
      model = std::make_shared<rc::RForestModel>(rc::train_rforest(X, y,
                                                                   hyper));
      break;
    }
    case rc::ModelKind::GBoost:
      model = std::make_shared<rc::GBoostModel>(rc::train_gboost(X, y,
                                                                 h.gboost));
      break;
    case rc::ModelKind::Ensemble:
      model = std::make_shared<rc::EnsembleModel>(
          rc::train_ensemble(X, y, seed));
      break;
    default:
      throw rc::ConfigError("unhandled model kind");
  }
  model->train_meta().seed = seed;
  rc::save_model(out, *model, space);
  std::printf("trained %s (%s, %zu clips) -> %s (seed %llu)\n",
              model_name.c_str(), pipeline.c_str(), clips.size(),
              out.c_str(), static_cast<unsigned long long>(seed));
  return 0;
}

int cmd_evaluate(const std::string& corpus, const std::string& model_name,
                 const std::string& pipeline, bool augment,
                 const std::string& out, const FeatureFlags& f,
                 const AsrFlags& asr, const AugmentFlags& aug,
                 const HyperFlags& h, uint64_t seed) {
  const auto index = rc::load_corpus_index(corpus);
  const auto clips = rc::load_clips(index);

  rc::GridOptions opt = make_grid_options(f, aug, h, seed);
  opt.augmented = augment;

  if (pipeline == "both") {
    opt.pipelines = {rc::PipelineKind::Textual, rc::PipelineKind::Spectral};
  } else {
    const auto pipe = rc::parse_pipeline(pipeline);
    if (!pipe) throw rc::ConfigError("unknown pipeline: " + pipeline);
    opt.pipelines = {*pipe};
  }

  if (model_name == "all") {
    opt.include_cnn = std::find(opt.pipelines.begin(), opt.pipelines.end(),
                                rc::PipelineKind::Spectral) !=
                      opt.pipelines.end();
  } else {
    const auto kind = rc::parse_model_kind(model_name);
    if (!kind) throw rc::ConfigError("unknown model: " + model_name);
    if (*kind == rc::ModelKind::Cnn) {
      opt.models.clear();
      opt.include_cnn = true;
      opt.pipelines = {rc::PipelineKind::Spectral};
    } else {
      opt.models = {*kind};
      opt.include_cnn = false;
    }
  }

  std::map<std::string, std::string> transcripts;
  if (std::find(opt.pipelines.begin(), opt.pipelines.end(),
                rc::PipelineKind::Textual) != opt.pipelines.end()) {
    auto provider = make_provider(asr, corpus);
    transcripts = gather_transcripts(index, *provider, true, nullptr);
  }

  const auto reports = rc::run_grid(clips, transcripts, opt);
  rc::write_reports_csv(out, reports);
  print_report_table(reports);
  std::printf("wrote %zu rows to %s (seed %llu)\n", reports.size(),
              out.c_str(), static_cast<unsigned long long>(seed));
  return 0;
}

int cmd_ablate(const std::string& corpus, const std::string& out,
               std::vector<uint64_t> seeds, double test_noise,
               const FeatureFlags& f, const AsrFlags& asr,
               const AugmentFlags& aug, const HyperFlags& h) {
  if (seeds.empty()) seeds = {41, 42, 43};
  const auto index = rc::load_corpus_index(corpus);
  const auto clips = rc::load_clips(index);

  rc::GridOptions base = make_grid_options(f, aug, h, seeds[0]);
  base.test_noise = test_noise;

  auto provider = make_provider(asr, corpus);
  const auto transcripts = gather_transcripts(index, *provider, true,
                                              nullptr);

  const auto reports = rc::run_ablation(clips, transcripts, base, seeds);
  rc::write_reports_csv(out, reports);
  print_report_table(reports);

  double acc_on = 0.0, acc_off = 0.0;
  int n_on = 0, n_off = 0;
  for (const auto& r : reports) {
    if (r.augmented) {
      acc_on += r.basic.accuracy;
      ++n_on;
    } else {
      acc_off += r.basic.accuracy;
      ++n_off;
    }
  }
  std::printf(
      "mean accuracy: augmented %.4f (%d cells) vs plain %.4f (%d cells), "
      "test noise %.4g\n",
      acc_on / n_on, n_on, acc_off / n_off, n_off, test_noise);
  std::printf("wrote %zu rows to %s\n", reports.size(), out.c_str());
  return 0;
}

int cmd_report(const std::string& in, const std::string& plot_dir) {
  const auto reports = rc::read_reports_csv(in);
  print_report_table(reports);
  if (!plot_dir.empty()) {
    fs::create_directories(plot_dir);
    std::ofstream f1_mcc(fs::path(plot_dir) / "f1_vs_mcc.csv",
                         std::ios::binary);
    std::ofstream roc_pr(fs::path(plot_dir) / "auroc_vs_aupr.csv",
                         std::ios::binary);
    f1_mcc << "f1,mcc\n";
    roc_pr << "auroc,aupr\n";
    char buf[64];
    for (const auto& r : reports) {
      std::snprintf(buf, sizeof(buf), "%.6f,%.6f\n", r.basic.f1, r.basic.mcc);
      f1_mcc << buf;
      std::snprintf(buf, sizeof(buf), "%.6f,%.6f\n", r.auroc_value,
                    r.aupr_value);
      roc_pr << buf;
    }
    if (!f1_mcc || !roc_pr)
      throw rc::IoError("write failed in " + plot_dir);
    std::printf("wrote plot data to %s\n", plot_dir.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual-pipeline (textual + spectral) classifier of pilot "
               "radio calls into landing vs takeoff"};
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config file (flags win)");

  uint64_t seed = 42;
  app.add_option("--seed", seed, "Global RNG seed")->capture_default_str();

  // datagen
  auto* datagen = app.add_subcommand("datagen", "Generate a synthetic corpus");
  int dg_n = 200;
  double dg_balance = 0.5;
  double dg_noise = 0.05;
  std::string dg_out;
  datagen->add_option("--n", dg_n, "Clip count")->capture_default_str();
  datagen->add_option("--balance", dg_balance, "Landing fraction")
      ->capture_default_str();
  datagen->add_option("--noise-level", dg_noise, "Pink-noise RMS level")
      ->capture_default_str();
  datagen->add_option("--out", dg_out, "Output directory")->required();

  // featurize
  auto* featurize = app.add_subcommand("featurize", "Write feature caches");
  std::string fz_corpus, fz_out, fz_pipeline = "both";
  bool fz_strict = false;
  FeatureFlags fz_features;
  AsrFlags fz_asr;
  featurize->add_option("--corpus", fz_corpus, "Corpus directory")
      ->required();
  featurize->add_option("--out", fz_out, "Output directory")->required();
  featurize->add_option("--pipeline", fz_pipeline, "Which cache to write")
      ->check(CLI::IsMember({"spectral", "textual", "both"}));
  featurize->add_flag("--strict", fz_strict,
                      "Fail on any missing transcript");
  add_feature_flags(featurize, fz_features);
  add_asr_flags(featurize, fz_asr);

  // augment
  auto* augment = app.add_subcommand("augment",
                                     "Materialize an augmented corpus");
  std::string ag_corpus, ag_out;
  AugmentFlags ag_flags;
  augment->add_option("--corpus", ag_corpus, "Corpus directory")->required();
  augment->add_option("--out", ag_out, "Output directory")->required();
  add_augment_flags(augment, ag_flags);

  // train
  auto* train = app.add_subcommand("train", "Fit a model on a whole corpus");
  std::string tr_corpus, tr_model = "logreg", tr_pipeline = "spectral";
  std::string tr_out = "model.json";
  FeatureFlags tr_features;
  AsrFlags tr_asr;
  HyperFlags tr_hyper;
  train->add_option("--corpus", tr_corpus, "Corpus directory")->required();
  train->add_option("--model", tr_model,
                    "logreg|svm|knn|dtree|rforest|gboost|ensemble|cnn")
      ->capture_default_str();
  train->add_option("--pipeline", tr_pipeline, "textual|spectral")
      ->capture_default_str();
  train->add_option("--out", tr_out, "Model file")->capture_default_str();
  add_feature_flags(train, tr_features);
  add_asr_flags(train, tr_asr);
  add_hyper_flags(train, tr_hyper);

  // evaluate
  auto* evaluate = app.add_subcommand(
      "evaluate", "Split, train, and score on the held-out part");
  std::string ev_corpus, ev_model = "all", ev_pipeline = "both";
  std::string ev_out = "report.csv";
  bool ev_augment = false;
  FeatureFlags ev_features;
  AsrFlags ev_asr;
  AugmentFlags ev_aug;
  HyperFlags ev_hyper;
  evaluate->add_option("--corpus", ev_corpus, "Corpus directory")->required();
  evaluate->add_option("--model", ev_model, "Model kind or 'all'")
      ->capture_default_str();
  evaluate->add_option("--pipeline", ev_pipeline,
                       "textual|spectral|both")
      ->capture_default_str();
  evaluate->add_flag("--augment", ev_augment,
                     "Augment the training partition");
  evaluate->add_option("--out", ev_out, "Report CSV")->capture_default_str();
  add_feature_flags(evaluate, ev_features);
  add_asr_flags(evaluate, ev_asr);
  add_augment_flags(evaluate, ev_aug);
  add_hyper_flags(evaluate, ev_hyper);

  // ablate
  auto* ablate = app.add_subcommand(
      "ablate", "Paired augmentation-off/on grids across seeds");
  std::string ab_corpus, ab_out = "ablation.csv";
  std::vector<uint64_t> ab_seeds;
  double ab_test_noise = 0.10;
  FeatureFlags ab_features;
  AsrFlags ab_asr;
  AugmentFlags ab_aug;
  HyperFlags ab_hyper;
  ablate->add_option("--corpus", ab_corpus, "Corpus directory")->required();
  ablate->add_option("--out", ab_out, "Report CSV")->capture_default_str();
  ablate->add_option("--seeds", ab_seeds, "Seeds (default 41 42 43)");
  ablate->add_option("--test-noise", ab_test_noise,
                     "Gaussian noise added to raw test clips")
      ->capture_default_str();
  add_feature_flags(ablate, ab_features);
  add_asr_flags(ablate, ab_asr);
  add_augment_flags(ablate, ab_aug);
  add_hyper_flags(ablate, ab_hyper);

  // report
  auto* report = app.add_subcommand("report", "Pretty-print a report CSV");
  std::string rp_in, rp_plot;
  report->add_option("--in", rp_in, "Report CSV")->required();
  report->add_option("--plot-data", rp_plot,
                     "Directory for (f1,mcc) and (auroc,aupr) pair files");

  try {
    app.parse(argc, argv);

    if (datagen->parsed())
      return cmd_datagen(dg_n, dg_balance, seed, dg_noise, dg_out);
    if (featurize->parsed())
      return cmd_featurize(fz_corpus, fz_out, fz_pipeline, fz_features,
                           fz_asr, fz_strict, seed);
    if (augment->parsed()) return cmd_augment(ag_corpus, ag_out, ag_flags,
                                              seed);
    if (train->parsed())
      return cmd_train(tr_corpus, tr_model, tr_pipeline, tr_out, tr_features,
                       tr_asr, tr_hyper, seed);
    if (evaluate->parsed())
      return cmd_evaluate(ev_corpus, ev_model, ev_pipeline, ev_augment,
                          ev_out, ev_features, ev_asr, ev_aug, ev_hyper,
                          seed);
    if (ablate->parsed())
      return cmd_ablate(ab_corpus, ab_out, ab_seeds, ab_test_noise,
                        ab_features, ab_asr, ab_aug, ab_hyper);
    if (report->parsed()) return cmd_report(rp_in, rp_plot);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return static_cast<int>(rc::ErrorClass::Config);
  } catch (const rc::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(e.error_class());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(rc::ErrorClass::Data);
  }
}
