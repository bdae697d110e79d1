#include "cagkit/store.hpp"

#include "cagkit/statement_json.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

namespace cagkit {

namespace fs = std::filesystem;
using nlohmann::json;

std::string utc_timestamp_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------- patches

void StatementPatch::merge(const StatementPatch& later) {
  if (later.discarded) discarded = later.discarded;
  if (later.polarity) polarity = later.polarity;
  if (later.subject) subject = later.subject;
  if (later.object) object = later.object;
}

json to_json(const StatementPatch& p) {
  json j = {{"id", p.statement_id}};
  if (p.discarded) j["discarded"] = *p.discarded;
  if (p.polarity) j["polarity"] = polarity_to_wire(*p.polarity);
  if (p.subject) j["subject"] = *p.subject;
  if (p.object) j["object"] = *p.object;
  return j;
}

StatementPatch patch_from_json(const json& j) {
  StatementPatch p;
  p.statement_id = j.at("id").get<std::string>();
  if (j.contains("discarded")) p.discarded = j["discarded"].get<bool>();
  if (j.contains("polarity")) {
    auto pol = polarity_from_wire(j["polarity"].get<int>());
    if (!pol) throw Error(ErrorCode::InvalidValue, "bad polarity in patch");
    p.polarity = pol;
  }
  if (j.contains("subject")) p.subject = j["subject"].get<std::string>();
  if (j.contains("object")) p.object = j["object"].get<std::string>();
  return p;
}

CausalStatement apply_patch(CausalStatement s, const StatementPatch& p) {
  if (p.discarded) s.discarded = *p.discarded;
  if (p.polarity) s.polarity = *p.polarity;
  if (p.subject) s.subject = *p.subject;
  if (p.object) s.object = *p.object;
  return s;
}

// ---------------------------------------------------------------- corpus

Corpus::Corpus(std::vector<CausalStatement> base, std::map<std::string, StatementPatch, std::less<>> overlay,
               Ontology ontology)
    : base_(std::move(base)), overlay_(std::move(overlay)), ontology_(std::move(ontology)) {
  rebuild();
}

void Corpus::rebuild() {
  statements_.clear();
  statements_.reserve(base_.size());
  for (const auto& s : base_) {
    auto it = overlay_.find(s.id);
    statements_.push_back(it == overlay_.end() ? s : apply_patch(s, it->second));
  }

  active_count_ = 0;
  for (StatementIndex i = 0; i < statements_.size(); ++i) {
    const auto& s = statements_[i];
    by_id_.emplace(s.id, i);
    ontology_.add(s.subject);
    ontology_.add(s.object);
    by_subject_[s.subject].push_back(i);
    by_object_[s.object].push_back(i);
    by_pair_[{s.subject, s.object}].push_back(i);

    std::set<std::string_view> docs;
    std::set<int> years;
    for (const auto& e : s.evidence) {
      docs.insert(e.doc_id);
      if (e.publication_date) years.insert(e.publication_date->year);
    }
    for (auto d : docs) by_doc_[std::string(d)].push_back(i);
    for (int y : years) by_year_[y].push_back(i);

    if (s.context.region_path) {
      const std::string& path = *s.context.region_path;
      std::size_t pos = 0;
      while (true) {
        pos = path.find('/', pos);
        by_region_[path.substr(0, pos)].push_back(i);
        if (pos == std::string::npos) break;
        ++pos;
      }
    }

    if (!s.discarded) {
      ++active_count_;
      ++concept_counts_[s.subject];
      ++concept_counts_[s.object];
      ++pair_support_[{s.subject, s.object}];
    }
  }

  for (const auto& [pair, support] : pair_support_) {
    outgoing_[pair.first].push_back({pair.second, support});
    incoming_[pair.second].push_back({pair.first, support});
  }
  for (auto& [_, v] : incoming_) {
    std::sort(v.begin(), v.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.concept_id < b.concept_id; });
  }
}

const CausalStatement* Corpus::find(std::string_view id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &statements_[it->second];
}

std::optional<StatementIndex> Corpus::index_of(std::string_view id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

namespace {

template <typename Map, typename Key>
std::span<const StatementIndex> postings(const Map& m, const Key& key) {
  auto it = m.find(key);
  if (it == m.end()) return {};
  return it->second;
}

}  // namespace

std::span<const StatementIndex> Corpus::by_subject(std::string_view c) const { return postings(by_subject_, c); }
std::span<const StatementIndex> Corpus::by_object(std::string_view c) const { return postings(by_object_, c); }
std::span<const StatementIndex> Corpus::by_pair(std::string_view s, std::string_view o) const {
  return postings(by_pair_, PairKey{std::string(s), std::string(o)});
}
std::span<const StatementIndex> Corpus::by_doc(std::string_view d) const { return postings(by_doc_, d); }
std::span<const StatementIndex> Corpus::by_region_prefix(std::string_view p) const {
  return postings(by_region_, p);
}
std::span<const StatementIndex> Corpus::by_year(int year) const { return postings(by_year_, year); }

std::span<const Neighbor> Corpus::outgoing(std::string_view c) const {
  auto it = outgoing_.find(c);
  if (it == outgoing_.end()) return {};
  return it->second;
}

std::span<const Neighbor> Corpus::incoming(std::string_view c) const {
  auto it = incoming_.find(c);
  if (it == incoming_.end()) return {};
  return it->second;
}

std::vector<CausalStatement> Corpus::statements_for_pair(std::string_view subject, std::string_view object,
                                                         bool include_discarded) const {
  std::vector<CausalStatement> out;
  for (StatementIndex i : by_pair(subject, object)) {
    if (include_discarded || !statements_[i].discarded) out.push_back(statements_[i]);
  }
  std::sort(out.begin(), out.end(), [](const CausalStatement& a, const CausalStatement& b) {
    if (a.belief != b.belief) return a.belief > b.belief;
    return a.id < b.id;
  });
  return out;
}

std::size_t Corpus::concept_statement_count(std::string_view c) const {
  auto it = concept_counts_.find(c);
  return it == concept_counts_.end() ? 0 : it->second;
}

std::size_t Corpus::pair_support(std::string_view s, std::string_view o) const {
  auto it = pair_support_.find(PairKey{std::string(s), std::string(o)});
  return it == pair_support_.end() ? 0 : it->second;
}

// ---------------------------------------------------------------- report

json to_json(const IngestReport& r) {
  json errors = json::array();
  for (const auto& issue : r.errors) {
    json list = json::array();
    for (const auto& e : issue.errors)
      list.push_back({{"code", to_string(e.code)}, {"field", e.field}, {"message", e.message}});
    errors.push_back({{"line", issue.line}, {"errors", std::move(list)}});
  }
  return {{"accepted", r.accepted}, {"rejected", r.rejected}, {"errors", std::move(errors)}};
}

// ---------------------------------------------------------------- lock

StoreLock::StoreLock(const fs::path& dir, bool exclusive) {
  if (dir.empty()) return;
  const auto path = dir / "LOCK";
  fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw Error(ErrorCode::StoreUnavailable, "cannot open store lock " + path.string());
  if (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw Error(ErrorCode::StoreUnavailable, "cannot acquire store lock " + path.string());
  }
}

StoreLock::~StoreLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

// ---------------------------------------------------------------- store

namespace {

std::vector<std::string> read_lines(const fs::path& path) {
  std::vector<std::string> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
  }
  return out;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp);
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot rename " + tmp + ": " + ec.message());
}

void append_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot append to " + path.string());
  out << content;
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "append failed for " + path.string());
}

// Inserts or replaces in place by id.
void upsert(std::vector<CausalStatement>& base, std::map<std::string, std::size_t>& positions,
            CausalStatement s) {
  auto it = positions.find(s.id);
  if (it != positions.end()) {
    base[it->second] = std::move(s);
  } else {
    positions.emplace(s.id, base.size());
    base.push_back(std::move(s));
  }
}

}  // namespace

StatementStore::StatementStore() : current_(std::make_shared<const Corpus>()) {}

StatementStore::StatementStore(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_))
    throw Error(ErrorCode::StoreUnavailable, "cannot open store directory " + dir_.string());
  load_from_disk();
}

void StatementStore::load_from_disk() {
  StoreLock lock(dir_, /*exclusive=*/false);
  Ontology onto;
  if (fs::exists(dir_ / "ontology.tsv")) onto.load_file(dir_ / "ontology.tsv");

  std::vector<CausalStatement> base;
  std::map<std::string, std::size_t> positions;
  for (const auto& line : read_lines(dir_ / "statements.jsonl")) {
    if (line.empty()) continue;
    auto v = validate_statement_line(line);
    if (v.ok()) upsert(base, positions, std::move(*v.statement));
  }

  std::map<std::string, StatementPatch, std::less<>> overlay;
  for (const auto& line : read_lines(dir_ / "overlay.jsonl")) {
    if (line.empty()) continue;
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;
    auto p = patch_from_json(j);
    overlay[p.statement_id].merge(p);
    overlay[p.statement_id].statement_id = p.statement_id;
  }

  std::optional<std::string> last;
  if (fs::exists(dir_ / "meta.json")) {
    std::ifstream in(dir_ / "meta.json");
    auto meta = json::parse(in, nullptr, false);
    if (meta.is_object() && meta.contains("last_ingest") && meta["last_ingest"].is_string())
      last = meta["last_ingest"].get<std::string>();
  }

  base_ontology_ = onto;
  {
    std::lock_guard guard(snapshot_mutex_);
    last_ingest_ = last;
  }
  publish(std::make_shared<const Corpus>(std::move(base), std::move(overlay), std::move(onto)));
}

void StatementStore::reload() {
  if (!persistent()) return;
  std::lock_guard writer(writer_mutex_);
  load_from_disk();
}

void StatementStore::publish(std::shared_ptr<const Corpus> next) {
  std::lock_guard lock(snapshot_mutex_);
  current_ = std::move(next);
}

std::shared_ptr<const Corpus> StatementStore::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return current_;
}

void StatementStore::write_meta() {
  if (!persistent()) return;
  json meta = {{"last_ingest", last_ingest_ ? json(*last_ingest_) : json(nullptr)}};
  write_file_atomic(dir_ / "meta.json", meta.dump() + "\n");
}

IngestReport StatementStore::ingest(const fs::path& file, IngestMode mode) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open ingest file " + file.string());
  std::vector<Line> lines;
  std::string text;
  std::size_t n = 0;
  while (std::getline(in, text)) {
    ++n;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    lines.push_back({n, std::move(text)});
  }
  return ingest_lines(lines, mode);
}

IngestReport StatementStore::ingest_text(std::string_view jsonl, IngestMode mode) {
  std::vector<Line> lines;
  std::size_t n = 0;
  std::size_t begin = 0;
  while (begin < jsonl.size()) {
    auto end = jsonl.find('\n', begin);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string line(jsonl.substr(begin, end - begin));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back({++n, std::move(line)});
    begin = end + 1;
  }
  return ingest_lines(lines, mode);
}

IngestReport StatementStore::ingest_records(const json& records, IngestMode mode) {
  if (!records.is_array()) throw Error(ErrorCode::InvalidValue, "records must be a JSON array");
  std::vector<Line> lines;
  for (std::size_t i = 0; i < records.size(); ++i) lines.push_back({i + 1, records[i].dump()});
  return ingest_lines(lines, mode);
}

IngestReport StatementStore::ingest_lines(const std::vector<Line>& lines, IngestMode mode) {
  IngestReport report;
  std::vector<CausalStatement> accepted;
  for (const auto& line : lines) {
    if (line.text.find_first_not_of(" \t") == std::string::npos) continue;
    auto v = validate_statement_line(line.text);
    if (v.ok()) {
      accepted.push_back(std::move(*v.statement));
      ++report.accepted;
    } else {
      ++report.rejected;
      report.errors.push_back({line.number, std::move(v.errors)});
    }
  }

  std::lock_guard writer(writer_mutex_);
  StoreLock lock(dir_, /*exclusive=*/true);
  auto prev = snapshot();

  std::vector<CausalStatement> base;
  std::map<std::string, StatementPatch, std::less<>> overlay;
  if (mode == IngestMode::Append) {
    base = prev->base();
    overlay = prev->overlay();
  }
  std::map<std::string, std::size_t> positions;
  for (std::size_t i = 0; i < base.size(); ++i) positions.emplace(base[i].id, i);
  for (auto& s : accepted) upsert(base, positions, s);

  if (persistent()) {
    std::string content;
    for (const auto& s : accepted) content += to_json(s).dump() + "\n";
    if (mode == IngestMode::Replace) {
      write_file_atomic(dir_ / "statements.jsonl", content);
      write_file_atomic(dir_ / "overlay.jsonl", "");
    } else {
      append_file(dir_ / "statements.jsonl", content);
    }
  }
  {
    std::lock_guard guard(snapshot_mutex_);
    last_ingest_ = utc_timestamp_now();
  }
  write_meta();
  publish(std::make_shared<const Corpus>(std::move(base), std::move(overlay), base_ontology_));
  return report;
}

void StatementStore::load_ontology(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open ontology file " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  load_ontology_text(buf.str());
}

void StatementStore::load_ontology_text(std::string_view text) {
  std::lock_guard writer(writer_mutex_);
  StoreLock lock(dir_, /*exclusive=*/true);
  Ontology onto = base_ontology_;
  onto.load_text(text);
  if (persistent()) {
    std::string content;
    for (const Concept* c : onto.concepts()) content += c->id + "\t" + c->display_name + "\n";
    write_file_atomic(dir_ / "ontology.tsv", content);
  }
  base_ontology_ = onto;
  auto prev = snapshot();
  publish(std::make_shared<const Corpus>(prev->base(), prev->overlay(), std::move(onto)));
}

void StatementStore::apply_patches(const std::vector<StatementPatch>& patches) {
  std::lock_guard writer(writer_mutex_);
  StoreLock lock(dir_, /*exclusive=*/true);
  auto prev = snapshot();
  auto overlay = prev->overlay();
  for (const auto& p : patches) {
    const CausalStatement* s = prev->find(p.statement_id);
    if (!s) throw Error(ErrorCode::UnknownStatement, "unknown statement " + p.statement_id);
    if (p.polarity && *p.polarity == Polarity::Unknown)
      throw Error(ErrorCode::InvalidValue, "curated polarity must be same or opposite");
    for (const auto* c : {&p.subject, &p.object}) {
      if (*c && !is_valid_concept_id(**c))
        throw Error(ErrorCode::InvalidValue, "invalid concept id " + **c);
    }
    auto& entry = overlay[p.statement_id];
    entry.statement_id = p.statement_id;
    entry.merge(p);
    const auto effective = apply_patch(*s, entry);
    if (effective.subject == effective.object)
      throw Error(ErrorCode::SelfLoop, "patch would make statement " + p.statement_id + " a self-loop");
  }
  if (persistent()) {
    std::string content;
    for (const auto& p : patches) content += to_json(p).dump() + "\n";
    append_file(dir_ / "overlay.jsonl", content);
  }
  publish(std::make_shared<const Corpus>(prev->base(), std::move(overlay), base_ontology_));
}

StoreStats StatementStore::stats() const {
  auto snap = snapshot();
  StoreStats s;
  s.statements = snap->size();
  s.active_statements = snap->active_count();
  s.concepts = snap->ontology().size();
  s.documents = snap->distinct_doc_count();
  {
    std::lock_guard lock(snapshot_mutex_);
    s.last_ingest = last_ingest_;
  }
  return s;
}

}  // namespace cagkit
