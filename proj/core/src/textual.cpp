#include "radioclass/textual.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "radioclass/audio_io.hpp"
#include "radioclass/errors.hpp"

namespace radioclass {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Transcript make_transcript(std::string clip_id, std::string text) {
  Transcript t;
  t.clip_id = std::move(clip_id);
  t.tokens = tokenize(text);
  t.text = std::move(text);
  return t;
}

TfIdfModel fit_tfidf(const std::vector<Transcript>& corpus) {
  if (corpus.empty()) throw EmptyCorpus("tf-idf fit on empty corpus");

  std::map<std::string, int> df;
  for (const auto& doc : corpus) {
    std::map<std::string, int> seen;
    for (const auto& tok : doc.tokens) seen[tok] = 1;
    for (const auto& [tok, _] : seen) df[tok] += 1;
  }
  if (df.empty()) throw EmptyCorpus("tf-idf fit on corpus with no tokens");

  TfIdfModel model;
  model.doc_count = static_cast<int>(corpus.size());
  int index = 0;
  for (const auto& [term, count] : df) {
    model.vocabulary.emplace(term, index++);
    model.idf.push_back(
        std::log(static_cast<double>(model.doc_count) / count));
  }
  return model;
}

FeatureVector transform_tfidf(const Transcript& doc, const TfIdfModel& model) {
  FeatureVector out(model.idf.size(), 0.0);
  for (const auto& tok : doc.tokens) {
    auto it = model.vocabulary.find(tok);
    if (it == model.vocabulary.end()) continue;
    out[it->second] += 1.0;
  }
  for (size_t i = 0; i < out.size(); ++i) out[i] *= model.idf[i];
  return out;
}

std::string tfidf_to_json(const TfIdfModel& model) {
  nlohmann::json j;
  j["vocabulary"] = model.vocabulary;
  j["idf"] = model.idf;
  j["doc_count"] = model.doc_count;
  j["log_base"] = "e";
  return j.dump(2);
}

TfIdfModel tfidf_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("tf-idf model parse: ") + e.what());
  }
  TfIdfModel model;
  try {
    model.vocabulary = j.at("vocabulary").get<std::map<std::string, int>>();
    model.idf = j.at("idf").get<std::vector<double>>();
    model.doc_count = j.at("doc_count").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("tf-idf model fields: ") + e.what());
  }
  if (model.vocabulary.size() != model.idf.size())
    throw IoError("tf-idf model: vocabulary/idf size mismatch");
  return model;
}

void save_tfidf(const std::filesystem::path& path, const TfIdfModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for write: " + path.string());
  out << tfidf_to_json(model) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

TfIdfModel load_tfidf(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return tfidf_from_json(buf.str());
}

std::string SidecarAsr::transcript_text(const AudioClip& clip) {
  const auto path = dir_ / (clip.id + ".txt");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingTranscript("no sidecar transcript: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r'))
    text.pop_back();
  return text;
}

std::string FixtureAsr::transcript_text(const AudioClip& clip) {
  auto it = transcripts_.find(clip.id);
  if (it == transcripts_.end())
    throw MissingTranscript("no fixture transcript for clip: " + clip.id);
  return it->second;
}

HttpAsr::HttpAsr(std::string endpoint, int timeout_ms)
    : timeout_ms_(timeout_ms) {
  const std::string_view schemes[] = {"http://", "https://"};
  size_t host_start = std::string::npos;
  for (auto scheme : schemes) {
    if (endpoint.rfind(scheme, 0) == 0) {
      host_start = scheme.size();
      break;
    }
  }
  if (host_start == std::string::npos)
    throw ConfigError("ASR endpoint must start with http:// or https://: " +
                      endpoint);
  const auto slash = endpoint.find('/', host_start);
  if (slash == std::string::npos) {
    base_ = endpoint;
    path_ = "/";
  } else {
    base_ = endpoint.substr(0, slash);
    path_ = endpoint.substr(slash);
  }
}

std::string HttpAsr::transcript_text(const AudioClip& clip) {
  httplib::Client client(base_);
  client.set_connection_timeout(0, timeout_ms_ * 1000);
  client.set_read_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);

  const auto body = encode_wav16(clip);
  auto res = client.Post(path_, reinterpret_cast<const char*>(body.data()),
                         body.size(), "audio/wav");
  if (!res)
    throw AsrServiceError("ASR request failed: " + base_ + path_ + " (" +
                          httplib::to_string(res.error()) + ")");
  if (res->status < 200 || res->status >= 300)
    throw AsrServiceError("ASR returned HTTP " + std::to_string(res->status) +
                          " for clip " + clip.id);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception&) {
    throw AsrServiceError("ASR returned malformed JSON for clip " + clip.id);
  }
  if (!j.contains("transcript") || !j["transcript"].is_string())
    throw AsrServiceError("ASR response missing transcript for clip " +
                          clip.id);
  return j["transcript"].get<std::string>();
}

Transcript transcribe(const AudioClip& clip, AsrProvider& provider) {
  return make_transcript(clip.id, provider.transcript_text(clip));
}

}  // namespace radioclass
