#pragma once

#include "cagkit/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace cagkit {

/// Validates one ingest record. Total: never throws for any JSON value; all
/// violated invariants are reported, not only the first.
StatementValidation validate_statement(const nlohmann::json& raw);

/// Parses one JSONL line, reporting MalformedLine for unparseable text.
StatementValidation validate_statement_line(std::string_view line);

/// Serializes in the ingest wire format. parse(serialize(s)) == s.
nlohmann::json to_json(const CausalStatement& s);

/// Content hash of (subject, object, polarity, first evidence doc_id + text),
/// used when a record carries no id.
std::string derive_statement_id(const CausalStatement& s);

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 14695981039346656037ull);

}  // namespace cagkit
