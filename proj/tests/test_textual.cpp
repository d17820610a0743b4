#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <httplib.h>

#include <fstream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "radioclass/audio_io.hpp"
#include "radioclass/errors.hpp"
#include "radioclass/rng.hpp"
#include "radioclass/textual.hpp"

using namespace radioclass;

TEST_CASE("tokenize lowercases, splits on non-alphanumerics, keeps digits") {
  CHECK(tokenize("Cessna 152, RUNWAY 27!") ==
        std::vector<std::string>{"cessna", "152", "runway", "27"});
  CHECK(tokenize("short-final... touch-and-go") ==
        std::vector<std::string>{"short", "final", "touch", "and", "go"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("  ,.!?  ").empty());
  CHECK(tokenize("A1b2") == std::vector<std::string>{"a1b2"});
}

TEST_CASE("fit_tfidf matches the brute-force oracle on random corpora") {
  auto rng = make_rng(71, "test/textual/oracle");
  const std::vector<std::string> pool = {
      "runway", "final", "takeoff", "landing", "cessna", "piper",
      "traffic", "pattern", "base", "wind", "full", "stop"};

  for (int trial = 0; trial < 20; ++trial) {
    const int n_docs = 2 + static_cast<int>(uniform_index(rng, 7));
    std::vector<std::vector<std::string>> doc_tokens(n_docs);
    std::vector<Transcript> docs(n_docs);
    for (int d = 0; d < n_docs; ++d) {
      const int n_tok = 1 + static_cast<int>(uniform_index(rng, 10));
      for (int t = 0; t < n_tok; ++t)
        doc_tokens[d].push_back(pool[uniform_index(rng, pool.size())]);
      docs[d].clip_id = "doc" + std::to_string(d);
      docs[d].tokens = doc_tokens[d];
    }

    std::vector<std::string> vocab;
    std::vector<double> idf;
    const auto expected = oracles::brute_tfidf(doc_tokens, &vocab, &idf);

    const auto model = fit_tfidf(docs);
    REQUIRE(model.dim() == static_cast<int>(vocab.size()));
    CHECK(model.doc_count == n_docs);
    size_t i = 0;
    for (const auto& [term, index] : model.vocabulary) {
      CHECK(term == vocab[i]);
      CHECK(index == static_cast<int>(i));
      CHECK(model.idf[i] == idf[i]);
      ++i;
    }
    for (int d = 0; d < n_docs; ++d) {
      const auto vec = transform_tfidf(docs[d], model);
      REQUIRE(vec.size() == expected[d].size());
      for (size_t t = 0; t < vec.size(); ++t) CHECK(vec[t] == expected[d][t]);
    }
  }
}

TEST_CASE("terms present in every document get idf exactly zero") {
  std::vector<Transcript> docs(3);
  docs[0] = make_transcript("a", "runway nine clear");
  docs[1] = make_transcript("b", "runway two four");
  docs[2] = make_transcript("c", "crossing runway now");
  const auto model = fit_tfidf(docs);
  const int idx = model.vocabulary.at("runway");
  CHECK(model.idf[idx] == 0.0);
  CHECK(model.idf[model.vocabulary.at("nine")] > 0.0);
}

TEST_CASE("out-of-vocabulary tokens are ignored at transform time") {
  std::vector<Transcript> docs(2);
  docs[0] = make_transcript("a", "left base");
  docs[1] = make_transcript("b", "right base");
  const auto model = fit_tfidf(docs);
  const auto vec = transform_tfidf(
      make_transcript("q", "zulu unknown base base"), model);
  const int base_idx = model.vocabulary.at("base");
  CHECK(vec[base_idx] == 0.0);  // universal term: idf 0
  double sum = 0.0;
  for (double v : vec) sum += std::abs(v);
  const int left_idx = model.vocabulary.at("left");
  CHECK(vec[left_idx] == 0.0);  // absent from the query
  CHECK(sum == 0.0);            // nothing else can contribute
}

TEST_CASE("vocabulary is ordered lexicographically") {
  std::vector<Transcript> docs(1);
  docs[0] = make_transcript("a", "zulu alpha 9 mike 10");
  const auto model = fit_tfidf(docs);
  std::vector<std::string> order;
  for (const auto& [term, idx] : model.vocabulary) {
    CHECK(idx == static_cast<int>(order.size()));
    order.push_back(term);
  }
  CHECK(order == std::vector<std::string>{"10", "9", "alpha", "mike", "zulu"});
}

TEST_CASE("degenerate corpora are rejected") {
  CHECK_THROWS_AS(fit_tfidf({}), EmptyCorpus);
  std::vector<Transcript> empty_docs(2);
  empty_docs[0] = make_transcript("a", "...");
  empty_docs[1] = make_transcript("b", "!!");
  CHECK_THROWS_AS(fit_tfidf(empty_docs), EmptyCorpus);
}

TEST_CASE("tfidf model round-trips through json on disk") {
  oracles::TempDir tmp;
  std::vector<Transcript> docs(2);
  docs[0] = make_transcript("a", "niner niner left downwind");
  docs[1] = make_transcript("b", "right downwind departure");
  const auto model = fit_tfidf(docs);

  const auto path = tmp.path() / "tfidf.json";
  save_tfidf(path, model);
  const auto back = load_tfidf(path);
  CHECK(back.doc_count == model.doc_count);
  CHECK(back.vocabulary == model.vocabulary);
  REQUIRE(back.idf.size() == model.idf.size());
  for (size_t i = 0; i < model.idf.size(); ++i)
    CHECK(back.idf[i] == model.idf[i]);

  CHECK_THROWS_AS(load_tfidf(tmp.path() / "absent.json"), IoError);
  std::ofstream(tmp.path() / "bad.json") << "not json";
  CHECK_THROWS_AS(load_tfidf(tmp.path() / "bad.json"), IoError);
}

TEST_CASE("sidecar provider reads <dir>/<id>.txt and strips the newline") {
  oracles::TempDir tmp;
  std::ofstream(tmp.path() / "clip_7.txt") << "go around, traffic on final\n";
  SidecarAsr provider(tmp.path());

  AudioClip clip;
  clip.id = "clip_7";
  CHECK(provider.transcript_text(clip) == "go around, traffic on final");

  clip.id = "clip_8";
  CHECK_THROWS_AS(provider.transcript_text(clip), MissingTranscript);
}

TEST_CASE("fixture provider serves the provided map") {
  FixtureAsr provider(std::map<std::string, std::string>{
      {"x", "hold short"}});
  AudioClip clip;
  clip.id = "x";
  CHECK(provider.transcript_text(clip) == "hold short");
  clip.id = "y";
  CHECK_THROWS_AS(provider.transcript_text(clip), MissingTranscript);
}

TEST_CASE("transcribe wraps provider output with the clip id and tokens") {
  FixtureAsr provider(std::map<std::string, std::string>{
      {"c1", "Departing Runway 27"}});
  AudioClip clip;
  clip.id = "c1";
  const auto t = transcribe(clip, provider);
  CHECK(t.clip_id == "c1");
  CHECK(t.text == "Departing Runway 27");
  CHECK(t.tokens == std::vector<std::string>{"departing", "runway", "27"});
}

TEST_CASE("http provider posts wav audio and reads the transcript field") {
  httplib::Server server;
  std::string seen_content_type;
  size_t seen_body_size = 0;
  bool wav_decodable = false;

  server.Post("/asr", [&](const httplib::Request& req,
                          httplib::Response& res) {
    seen_content_type = req.get_header_value("Content-Type");
    seen_body_size = req.body.size();
    try {
      const std::vector<uint8_t> body(req.body.begin(), req.body.end());
      wav_decodable = !decode_wav(body).channels.empty();
    } catch (...) {
      wav_decodable = false;
    }
    res.set_content(R"({"transcript": "cleared to land runway 27"})",
                    "application/json");
  });
  server.Post("/fail", [](const httplib::Request&, httplib::Response& res) {
    res.status = 500;
    res.set_content("boom", "text/plain");
  });
  server.Post("/notjson", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("<<<", "application/json");
  });
  server.Post("/nofield", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"text": "missing"})", "application/json");
  });

  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread runner([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  auto rng = make_rng(73, "test/textual/http");
  const AudioClip clip = oracles::random_clip(2205, 22050, rng, 0.4);
  const std::string base = "http://127.0.0.1:" + std::to_string(port);

  {
    HttpAsr asr(base + "/asr");
    CHECK(asr.transcript_text(clip) == "cleared to land runway 27");
    CHECK(seen_content_type == "audio/wav");
    CHECK(seen_body_size == encode_wav16(clip).size());
    CHECK(wav_decodable);
  }
  {
    HttpAsr asr(base + "/fail");
    CHECK_THROWS_AS(asr.transcript_text(clip), AsrServiceError);
  }
  {
    HttpAsr asr(base + "/notjson");
    CHECK_THROWS_AS(asr.transcript_text(clip), AsrServiceError);
  }
  {
    HttpAsr asr(base + "/nofield");
    CHECK_THROWS_AS(asr.transcript_text(clip), AsrServiceError);
  }

  server.stop();
  runner.join();

  // Nothing listens on the freed port anymore: transport failure.
  HttpAsr dead(base + "/asr", 500);
  CHECK_THROWS_AS(dead.transcript_text(clip), AsrServiceError);
}

TEST_CASE("http provider rejects endpoints without an http scheme") {
  CHECK_THROWS_AS(HttpAsr("ftp://example.com/asr"), ConfigError);
  CHECK_THROWS_AS(HttpAsr("localhost:8000/asr"), ConfigError);
}
