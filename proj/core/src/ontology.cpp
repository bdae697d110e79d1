#include "cagkit/ontology.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace cagkit {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

const Concept& Ontology::add(std::string_view id, std::optional<std::string> display_name) {
  auto it = concepts_.find(id);
  if (it == concepts_.end()) {
    Concept c = make_concept(id);
    if (display_name && !display_name->empty()) {
      c.display_name = *display_name;
      explicit_names_.emplace(std::string(id), true);
    }
    it = concepts_.emplace(std::string(id), std::move(c)).first;
  } else if (display_name && !display_name->empty()) {
    it->second.display_name = *display_name;
    explicit_names_.insert_or_assign(std::string(id), true);
  }
  return it->second;
}

void Ontology::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open ontology file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  load_text(buf.str());
}

void Ontology::load_text(std::string_view text) {
  std::size_t line_no = 0;
  std::size_t begin = 0;
  while (begin < text.size()) {
    auto end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string line = trim(text.substr(begin, end - begin));
    begin = end + 1;
    if (line.empty() || line.front() == '#') continue;
    std::optional<std::string> name;
    std::string id = line;
    if (auto tab = line.find('\t'); tab != std::string::npos) {
      id = trim(line.substr(0, tab));
      name = trim(line.substr(tab + 1));
    }
    if (!is_valid_concept_id(id))
      throw Error(ErrorCode::InvalidValue,
                  "ontology line " + std::to_string(line_no) + ": invalid concept id '" + id + "'");
    add(id, name);
  }
}

bool Ontology::contains(std::string_view id) const { return concepts_.find(id) != concepts_.end(); }

const Concept* Ontology::find(std::string_view id) const {
  auto it = concepts_.find(id);
  return it == concepts_.end() ? nullptr : &it->second;
}

std::string Ontology::display_name(std::string_view id) const {
  if (const Concept* c = find(id)) return c->display_name;
  return derive_display_name(id);
}

std::vector<const Concept*> Ontology::concepts() const {
  std::vector<const Concept*> out;
  out.reserve(concepts_.size());
  for (const auto& [_, c] : concepts_) out.push_back(&c);
  return out;
}

std::vector<std::string> Ontology::subtree(std::string_view root) const {
  std::vector<std::string> out;
  for (auto it = concepts_.lower_bound(root); it != concepts_.end(); ++it) {
    if (it->first.compare(0, root.size(), root) != 0) break;
    if (concept_in_subtree(it->first, root)) out.push_back(it->first);
  }
  return out;
}

std::vector<std::string> Ontology::siblings(std::string_view id) const {
  const std::string parent = concept_parent(id);
  std::vector<std::string> out;
  for (const auto& [cid, _] : concepts_) {
    if (cid != id && concept_parent(cid) == parent) out.push_back(cid);
  }
  return out;
}

std::optional<std::string> Ontology::resolve(std::string_view query) const {
  if (contains(query)) return std::string(query);
  const std::string q = lower(trim(query));
  std::optional<std::string> by_leaf;
  int leaf_hits = 0;
  std::optional<std::string> by_name;
  int name_hits = 0;
  for (const auto& [id, c] : concepts_) {
    if (lower(concept_leaf(id)) == q) {
      by_leaf = id;
      ++leaf_hits;
    }
    if (lower(c.display_name) == q) {
      by_name = id;
      ++name_hits;
    }
  }
  if (leaf_hits == 1) return by_leaf;
  if (name_hits == 1) return by_name;
  return std::nullopt;
}

}  // namespace cagkit
