#pragma once

#include "cagkit/types.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cagkit {

/// Flat concept registry. A concept exists iff it was loaded from an ontology
/// file or appeared in an ingested statement.
class Ontology {
 public:
  /// Registers `id` if unseen; returns the stored concept. Explicit display
  /// names replace derived ones, never the other way round.
  const Concept& add(std::string_view id, std::optional<std::string> display_name = std::nullopt);

  /// One concept path per line, optional tab-separated display name.
  /// Blank lines and lines starting with '#' are skipped.
  void load_file(const std::filesystem::path& path);
  void load_text(std::string_view text);

  bool contains(std::string_view id) const;
  const Concept* find(std::string_view id) const;
  /// Display name of a registered concept, else the derived one.
  std::string display_name(std::string_view id) const;
  std::size_t size() const { return concepts_.size(); }

  /// All registered concepts in id order.
  std::vector<const Concept*> concepts() const;
  /// Registered concepts in the subtree rooted at `root` (root included when registered).
  std::vector<std::string> subtree(std::string_view root) const;
  /// Registered concepts sharing `id`'s parent, excluding `id`.
  std::vector<std::string> siblings(std::string_view id) const;

  /// Resolves user input: exact id, then unique leaf-segment match, then
  /// unique case-insensitive display-name match.
  std::optional<std::string> resolve(std::string_view query) const;

 private:
  std::map<std::string, Concept, std::less<>> concepts_;
  std::map<std::string, bool, std::less<>> explicit_names_;
};

}  // namespace cagkit
