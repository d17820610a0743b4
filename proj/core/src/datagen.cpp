#include "radioclass/datagen.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>

#include "radioclass/audio_io.hpp"
#include "radioclass/corpus.hpp"
#include "radioclass/errors.hpp"
#include "radioclass/rng.hpp"

namespace radioclass {

std::vector<double> pink_noise(size_t n, std::mt19937_64& rng) {
  constexpr int kRows = 16;
  std::array<double, kRows> rows{};
  for (auto& r : rows) r = gaussian(rng);
  double row_sum = std::accumulate(rows.begin(), rows.end(), 0.0);

  std::vector<double> out(n);
  uint64_t counter = 0;
  for (size_t i = 0; i < n; ++i) {
    ++counter;
    int idx = 0;
    for (uint64_t c = counter; (c & 1) == 0 && idx < kRows - 1; c >>= 1)
      ++idx;
    row_sum -= rows[idx];
    rows[idx] = gaussian(rng);
    row_sum += rows[idx];
    out[i] = row_sum + gaussian(rng);
  }

  double rms = 0.0;
  for (double v : out) rms += v * v;
  rms = std::sqrt(rms / static_cast<double>(n));
  if (rms > 0.0)
    for (auto& v : out) v /= rms;
  return out;
}

namespace {

/// Raised-cosine-gated tone added in place over [start, start+length).
void add_tone(std::vector<double>& samples, int sample_rate, double freq,
              double amplitude, size_t start, size_t length) {
  const double w = 2.0 * std::numbers::pi * freq / sample_rate;
  for (size_t i = 0; i < length && start + i < samples.size(); ++i) {
    const double env =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (i + 1) /
                             (length + 1));
    samples[start + i] +=
        amplitude * env * std::sin(w * static_cast<double>(i));
  }
}

constexpr std::array<double, 4> kLandingBands = {900.0, 740.0, 590.0, 470.0};
constexpr std::array<double, 4> kTakeoffBands = {1350.0, 1650.0, 2000.0,
                                                 2400.0};

const std::vector<std::string>& landing_phrases() {
  static const std::vector<std::string> phrases = {
      "Turning crosswind for runway {RWY}.",
      "Reduce speed and descend to {ALT} feet for landing.",
      "{CS} on final for runway {RWY}, full stop.",
      "{CS} entering left downwind for runway {RWY} for landing.",
      "{CS} turning base for runway {RWY}, cleared to land.",
  };
  return phrases;
}

const std::vector<std::string>& takeoff_phrases() {
  static const std::vector<std::string> phrases = {
      "Departing runway {RWY} and staying in the pattern.",
      "Taxi into position and hold for takeoff.",
      "{CS} rolling for takeoff on runway {RWY}.",
      "{CS} departing runway {RWY}, climbing to {ALT} feet.",
      "Lining up on runway {RWY}, ready for departure.",
  };
  return phrases;
}

void replace_all(std::string& text, const std::string& key,
                 const std::string& value) {
  for (size_t pos = text.find(key); pos != std::string::npos;
       pos = text.find(key, pos + value.size()))
    text.replace(pos, key.size(), value);
}

std::string render_phrase(Label label, std::mt19937_64& rng) {
  static const std::vector<std::string> kTypes = {"Cessna", "Piper", "Cirrus",
                                                  "Skyhawk", "Cherokee"};
  const auto& bank =
      label == Label::Landing ? landing_phrases() : takeoff_phrases();
  std::string text = bank[uniform_index(rng, bank.size())];

  const auto runway =
      std::to_string(static_cast<int>(uniform_index(rng, 36)) + 1);
  const auto altitude =
      std::to_string(2000 + 500 * static_cast<int>(uniform_index(rng, 7)));
  const auto callsign = kTypes[uniform_index(rng, kTypes.size())] + " " +
                        std::to_string(uniform_index(rng, 900) + 100);

  replace_all(text, "{RWY}", runway);
  replace_all(text, "{ALT}", altitude);
  replace_all(text, "{CS}", callsign);
  return text;
}

}  // namespace

std::pair<AudioClip, std::string> synthesize_clip(Label label,
                                                  const std::string& id,
                                                  const SynthSpec& spec) {
  auto rng = make_rng(spec.seed ^ fnv1a64(id), "datagen/clip");

  const auto n = static_cast<size_t>(
      std::llround(spec.duration * spec.sample_rate));
  AudioClip clip;
  clip.sample_rate = spec.sample_rate;
  clip.label = label;
  clip.id = id;
  clip.samples = pink_noise(n, rng);
  for (auto& s : clip.samples) s *= spec.noise_level;

  // Motif enters after a noise-only lead so noise profiles estimated from
  // the opening frames see pure background.
  const auto& bands =
      label == Label::Landing ? kLandingBands : kTakeoffBands;
  const double lead = 0.30 + 0.08 * uniform_unit(rng);
  const auto start0 = static_cast<size_t>(lead * spec.sample_rate);
  const auto seg = static_cast<size_t>(0.55 * spec.sample_rate);
  for (size_t b = 0; b < bands.size(); ++b) {
    const double freq = bands[b] * (1.0 + 0.04 * (2.0 * uniform_unit(rng) - 1.0));
    const double amp =
        spec.motif_level * (1.0 + 0.2 * (2.0 * uniform_unit(rng) - 1.0));
    add_tone(clip.samples, spec.sample_rate, freq, amp, start0 + b * seg,
             seg);
  }

  for (auto& s : clip.samples) s = std::clamp(s, -1.0, 1.0);
  return {std::move(clip), render_phrase(label, rng)};
}

void generate_corpus(const SynthSpec& spec,
                     const std::filesystem::path& out_dir) {
  if (spec.n_clips < 4) throw ConfigError("datagen needs n_clips >= 4");
  if (!(spec.class_balance > 0.0 && spec.class_balance < 1.0))
    throw ConfigError("class balance must be in (0, 1)");

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string());

  const auto n_landing = static_cast<int>(
      std::llround(spec.class_balance * spec.n_clips));

  std::vector<CorpusEntry> entries;
  for (int i = 0; i < spec.n_clips; ++i) {
    char id_buf[32];
    std::snprintf(id_buf, sizeof(id_buf), "clip_%04d", i);
    const std::string id = id_buf;
    const Label label = i < n_landing ? Label::Landing : Label::Takeoff;

    auto [clip, transcript] = synthesize_clip(label, id, spec);
    write_wav16(out_dir / (id + ".wav"), clip);

    std::ofstream txt(out_dir / (id + ".txt"), std::ios::binary);
    if (!txt) throw IoError("cannot write transcript for " + id);
    txt << transcript << '\n';

    CorpusEntry entry;
    entry.id = id;
    entry.label = label;
    entry.wav_path = out_dir / (id + ".wav");
    entry.txt_path = out_dir / (id + ".txt");
    entries.push_back(std::move(entry));
  }
  write_labels_csv(out_dir, entries);
}

}  // namespace radioclass
