#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "radioclass/types.hpp"

namespace radioclass {

// One labels.csv row plus the paths derived from it. The transcript sidecar
// is optional at index time; consumers that need it fail on access.
struct CorpusEntry {
  std::string id;
  Label label = Label::Landing;
  std::filesystem::path wav_path;
  std::filesystem::path txt_path;

  bool has_transcript() const;
};

struct CorpusIndex {
  std::filesystem::path root;
  std::vector<CorpusEntry> entries;
};

/// Parse `<dir>/labels.csv` (header `id,label`, labels landing|takeoff) and
/// resolve `<dir>/<id>.wav` / `<dir>/<id>.txt`. Rows keep file order.
/// Throws IoError on missing/ill-formed csv or missing wav, EmptyCorpus on
/// zero rows.
CorpusIndex load_corpus_index(const std::filesystem::path& dir);

void write_labels_csv(const std::filesystem::path& dir,
                      const std::vector<CorpusEntry>& entries);

/// Decode the wav, attach id and label. The clip is returned as stored on
/// disk; canonicalization is the caller's choice.
AudioClip load_clip(const CorpusEntry& entry);

std::vector<AudioClip> load_clips(const CorpusIndex& index);

}  // namespace radioclass
