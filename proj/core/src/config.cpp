#include "cagkit/config.hpp"

#include "cagkit/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace cagkit {

WorkspaceConfig Config::workspace() const { return {belief_policy, acyclicity, duplicate_threshold}; }

LayoutOptions Config::layout(AcyclicityPolicy policy) const {
  LayoutOptions o;
  o.policy = policy;
  o.spacing_rule = spacing;
  o.grid_step = grid_step;
  o.sweeps = sweeps;
  return o;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::InvalidValue, "config line " + std::to_string(line) + ": " + msg, {{"line", line}});
}

template <typename T>
T number(std::string_view v, std::size_t line) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad(line, "expected a number, got '" + std::string(v) + "'");
  return out;
}

double real(std::string_view v, std::size_t line) {
  try {
    std::size_t used = 0;
    const std::string s(v);
    double d = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    bad(line, "expected a real number, got '" + std::string(v) + "'");
  }
}

}  // namespace

Config parse_config(std::string_view text, Config c) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    bool quoted = false;
    std::size_t hash = std::string_view::npos;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') quoted = !quoted;
      if (s[i] == '#' && !quoted) {
        hash = i;
        break;
      }
    }
    s = trim(s.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) bad(line, "expected key = value");
    const std::string key(trim(s.substr(0, eq)));
    std::string_view value = trim(s.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);

    if (key == "store") c.store_dir = std::string(value);
    else if (key == "host") c.host = std::string(value);
    else if (key == "port") c.port = number<std::uint16_t>(value, line);
    else if (key == "token") c.token = value.empty() ? std::nullopt : std::optional<std::string>(value);
    else if (key == "embeddings") c.embeddings = std::filesystem::path(std::string(value));
    else if (key == "belief_policy") {
      auto p = parse_belief_policy(value);
      if (!p) bad(line, "belief_policy must be max or mean");
      c.belief_policy = *p;
    } else if (key == "acyclicity") {
      auto p = parse_acyclicity_policy(value);
      if (!p) bad(line, "acyclicity must be enforced or relaxed");
      c.acyclicity = *p;
    } else if (key == "duplicate_threshold") {
      c.duplicate_threshold = real(value, line);
      if (c.duplicate_threshold < 0 || c.duplicate_threshold > 1) bad(line, "duplicate_threshold must be in [0, 1]");
    } else if (key == "edge_limit") c.edge_limit = number<std::size_t>(value, line);
    else if (key == "max_hops") c.max_hops = number<std::size_t>(value, line);
    else if (key == "min_cluster_size") c.hdbscan.min_cluster_size = number<std::size_t>(value, line);
    else if (key == "layout.layer_gap") c.spacing.base.layer_gap = real(value, line);
    else if (key == "layout.node_gap") c.spacing.base.node_gap = real(value, line);
    else if (key == "layout.reduced_layer_gap") c.spacing.reduced.layer_gap = real(value, line);
    else if (key == "layout.reduced_node_gap") c.spacing.reduced.node_gap = real(value, line);
    else if (key == "layout.spacing_threshold") c.spacing.threshold = number<std::size_t>(value, line);
    else if (key == "layout.grid_step") {
      c.grid_step = number<int>(value, line);
      if (c.grid_step <= 0) bad(line, "layout.grid_step must be positive");
    } else if (key == "layout.sweeps") c.sweeps = number<int>(value, line);
    else bad(line, "unknown key '" + key + "'");
  }
  return c;
}

Config load_config(const std::filesystem::path& path, Config base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

}  // namespace cagkit
