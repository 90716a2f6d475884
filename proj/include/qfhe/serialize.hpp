#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfhe/evaluator.hpp"

// JSON/CSV serialization of transcripts and experiment outputs, plus a small
// schema checker (type / required / properties / items / enum subset) run
// against the schema files shipped under schemas/ before anything is written.

namespace qfhe::serialize {

using nlohmann::json;

std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(const std::string& hex);

json transcript_to_json(const EvalTranscript& t);

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Throws SchemaError with a path-qualified message on the first violation.
void validate_schema(const json& value, const json& schema, const std::string& path = "$");

// Loads schemas/<name>.schema.json next to the executable's repo root; the
// search walks upward from `start_dir` until a schemas/ directory is found.
json load_schema(const std::string& name, const std::string& start_dir = ".");

// Validates against the named schema, then writes pretty-printed JSON.
void write_json_validated(const json& value, const std::string& schema_name,
                          const std::string& out_path);

// CSV with a fixed header; every row must have exactly the header's arity.
void write_csv(const std::string& out_path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace qfhe::serialize
