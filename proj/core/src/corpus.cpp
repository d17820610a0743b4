#include "radioclass/corpus.hpp"

#include <fstream>

#include "radioclass/audio_io.hpp"
#include "radioclass/errors.hpp"

namespace radioclass {

namespace {

std::string strip_eol(std::string line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
    line.pop_back();
  return line;
}

}  // namespace

bool CorpusEntry::has_transcript() const {
  std::error_code ec;
  return std::filesystem::is_regular_file(txt_path, ec);
}

CorpusIndex load_corpus_index(const std::filesystem::path& dir) {
  const auto csv_path = dir / "labels.csv";
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + csv_path.string());

  std::string line;
  if (!std::getline(in, line))
    throw IoError("empty labels file: " + csv_path.string());
  if (strip_eol(line) != "id,label")
    throw IoError("labels.csv must start with header 'id,label': " +
                  csv_path.string());

  CorpusIndex index;
  index.root = dir;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_eol(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 >= line.size())
      throw IoError("labels.csv line " + std::to_string(line_no) +
                    ": expected 'id,label'");
    CorpusEntry entry;
    entry.id = line.substr(0, comma);
    const auto label_text = line.substr(comma + 1);
    const auto label = parse_label(label_text);
    if (!label)
      throw IoError("labels.csv line " + std::to_string(line_no) +
                    ": unknown label '" + label_text + "'");
    entry.label = *label;
    entry.wav_path = dir / (entry.id + ".wav");
    entry.txt_path = dir / (entry.id + ".txt");
    if (!std::filesystem::is_regular_file(entry.wav_path))
      throw IoError("missing audio for id '" + entry.id +
                    "': " + entry.wav_path.string());
    index.entries.push_back(std::move(entry));
  }
  if (index.entries.empty())
    throw EmptyCorpus("no rows in " + csv_path.string());
  return index;
}

void write_labels_csv(const std::filesystem::path& dir,
                      const std::vector<CorpusEntry>& entries) {
  const auto csv_path = dir / "labels.csv";
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw IoError("cannot open for write: " + csv_path.string());
  out << "id,label\n";
  for (const auto& entry : entries)
    out << entry.id << ',' << to_string(entry.label) << '\n';
  if (!out) throw IoError("write failed: " + csv_path.string());
}

AudioClip load_clip(const CorpusEntry& entry) {
  AudioClip clip = load_wav(entry.wav_path);
  clip.id = entry.id;
  clip.label = entry.label;
  return clip;
}

std::vector<AudioClip> load_clips(const CorpusIndex& index) {
  std::vector<AudioClip> clips;
  clips.reserve(index.entries.size());
  for (const auto& entry : index.entries) clips.push_back(load_clip(entry));
  return clips;
}

}  // namespace radioclass
