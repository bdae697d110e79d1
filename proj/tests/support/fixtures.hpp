#pragma once

#include "cagkit/store.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace cagkit::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(CAGKIT_FIXTURE_DIR) / name;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "cagkit") {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / (tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline Corpus corpus_of(std::vector<CausalStatement> statements) { return Corpus(std::move(statements), {}, Ontology{}); }

}  // namespace cagkit::testing
