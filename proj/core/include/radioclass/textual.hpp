#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "radioclass/types.hpp"

namespace radioclass {

struct Transcript {
  std::string clip_id;
  std::string text;
  std::vector<std::string> tokens;
};

/// Lowercase, split on any non-alphanumeric, drop empties. Digits are kept;
/// runway numbers carry signal.
std::vector<std::string> tokenize(std::string_view text);

Transcript make_transcript(std::string clip_id, std::string text);

// Fitted vocabulary and idf weights. idf uses the natural log; vocabulary
// order is lexicographic for run-to-run determinism.
struct TfIdfModel {
  std::map<std::string, int> vocabulary;
  std::vector<double> idf;
  int doc_count = 0;

  int dim() const { return static_cast<int>(idf.size()); }
};

/// idf[t] = ln(N / df(t)); df >= 1 by construction so idf is finite.
TfIdfModel fit_tfidf(const std::vector<Transcript>& corpus);

/// value[t] = raw count of t in doc * idf[t]; out-of-vocabulary tokens
/// are ignored.
FeatureVector transform_tfidf(const Transcript& doc, const TfIdfModel& model);

std::string tfidf_to_json(const TfIdfModel& model);
TfIdfModel tfidf_from_json(const std::string& json_text);
void save_tfidf(const std::filesystem::path& path, const TfIdfModel& model);
TfIdfModel load_tfidf(const std::filesystem::path& path);

// Transcript sources behind one boundary; any provider yielding text per
// clip plugs in, from sidecar files to a live speech-to-text service.
class AsrProvider {
 public:
  virtual ~AsrProvider() = default;
  virtual std::string transcript_text(const AudioClip& clip) = 0;
};

/// Reads `<dir>/<id>.txt`. Throws MissingTranscript when absent.
class SidecarAsr final : public AsrProvider {
 public:
  explicit SidecarAsr(std::filesystem::path dir) : dir_(std::move(dir)) {}
  std::string transcript_text(const AudioClip& clip) override;

 private:
  std::filesystem::path dir_;
};

/// In-memory id -> text map for tests.
class FixtureAsr final : public AsrProvider {
 public:
  explicit FixtureAsr(std::map<std::string, std::string> transcripts)
      : transcripts_(std::move(transcripts)) {}
  std::string transcript_text(const AudioClip& clip) override;

 private:
  std::map<std::string, std::string> transcripts_;
};

/// POSTs the clip as 16-bit WAV to an endpoint answering
/// {"transcript": "..."}. Non-2xx, malformed JSON, and timeouts raise
/// AsrServiceError.
class HttpAsr final : public AsrProvider {
 public:
  explicit HttpAsr(std::string endpoint, int timeout_ms = 5000);
  std::string transcript_text(const AudioClip& clip) override;

 private:
  std::string base_;  // scheme://host:port
  std::string path_;
  int timeout_ms_;
};

Transcript transcribe(const AudioClip& clip, AsrProvider& provider);

}  // namespace radioclass
