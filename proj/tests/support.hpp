#pragma once

#include <stdlib.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "reasonsum/core.hpp"

namespace testing_support {

namespace fs = std::filesystem;

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string pattern = (fs::temp_directory_path() / "reasonsum-XXXXXX").string();
    path_ = mkdtemp(pattern.data());
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& contents) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << contents;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

/// A short multi-sentence news-like document.
inline std::string document(int sentences, const std::string& topic = "council") {
  static const char* kVerbs[] = {"approved", "debated", "reviewed", "delayed", "funded", "praised"};
  static const char* kObjects[] = {"the budget", "a new park", "road repairs", "the library plan",
                                   "school meals", "the bus routes"};
  std::string out;
  for (int i = 0; i < sentences; ++i) {
    if (i) out += " ";
    out += "The " + topic + " " + kVerbs[i % 6] + " " + kObjects[(i * 5 + 1) % 6] + " on day " +
           std::to_string(i + 1) + ".";
  }
  return out;
}

inline reasonsum::SampleRecord sample(const std::string& id, const std::string& doc,
                                      const std::string& reference = "The council approved the budget.",
                                      const std::string& dataset = "cnn_dm") {
  reasonsum::SampleRecord r;
  r.sample_id = id;
  r.dataset_id = dataset;
  r.document = doc;
  r.reference = reference;
  return r;
}

/// JSONL with `n` records `{"id": "<prefix>i", "document": ..., "summary": ...}`.
inline std::string jsonl_dataset(int n, const std::string& prefix = "s", int sentences = 4) {
  std::string out;
  for (int i = 0; i < n; ++i) {
    reasonsum::json j{{"id", prefix + std::to_string(i)},
                      {"document", document(sentences + i % 3, "council " + std::to_string(i))},
                      {"summary", "The council " + std::to_string(i) + " approved the budget."}};
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace testing_support
