#include "qfhe/serialize.hpp"

#include <filesystem>
#include <fstream>

namespace qfhe::serialize {

namespace fs = std::filesystem;

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

std::vector<std::uint8_t> from_hex(const std::string& hex) {
    if (hex.size() % 2) throw SchemaError("odd hex string length");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw SchemaError("invalid hex digit");
    };
    std::vector<std::uint8_t> out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
    return out;
}

json transcript_to_json(const EvalTranscript& t) {
    json gates = json::array();
    for (const GateOp& g : t.gates)
        gates.push_back({{"gate", gate_name(g.kind)}, {"wires", g.wires}});
    json measurements = json::array();
    for (const auto& [label, bit] : t.measurements)
        measurements.push_back({{"label", label}, {"bit", bit}});
    json final_keys = json::array();
    for (std::size_t w = 0; w < t.final_keys.size(); ++w) {
        final_keys.push_back({{"wire", static_cast<int>(w)},
                              {"enc_z", to_hex(t.final_keys[w].first.serialize())},
                              {"enc_x", to_hex(t.final_keys[w].second.serialize())},
                              {"expr_z", t.final_exprs[w].z.to_string()},
                              {"expr_x", t.final_exprs[w].x.to_string()}});
    }
    return json{{"version", 1},
                {"backend", t.backend == Backend::qubit ? "qubit" : "optics"},
                {"seed", t.seed},
                {"gates", gates},
                {"measurements", measurements},
                {"final_keys", final_keys}};
}

namespace {

bool type_matches(const json& value, const std::string& type) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "number") return value.is_number();
    if (type == "integer") return value.is_number_integer() || value.is_number_unsigned();
    if (type == "boolean") return value.is_boolean();
    if (type == "null") return value.is_null();
    throw SchemaError("unknown schema type: " + type);
}

}  // namespace

void validate_schema(const json& value, const json& schema, const std::string& path) {
    if (schema.contains("type")) {
        const std::string type = schema["type"].get<std::string>();
        if (!type_matches(value, type))
            throw SchemaError(path + ": expected " + type + ", got " + std::string(value.type_name()));
    }
    if (schema.contains("enum")) {
        bool ok = false;
        for (const json& candidate : schema["enum"])
            if (candidate == value) ok = true;
        if (!ok) throw SchemaError(path + ": value not in enum");
    }
    if (schema.contains("required"))
        for (const json& k : schema["required"])
            if (!value.contains(k.get<std::string>()))
                throw SchemaError(path + ": missing required key " + k.get<std::string>());
    if (schema.contains("properties") && value.is_object())
        for (const auto& [k, sub] : schema["properties"].items())
            if (value.contains(k)) validate_schema(value[k], sub, path + "." + k);
    if (schema.contains("items") && value.is_array())
        for (std::size_t i = 0; i < value.size(); ++i)
            validate_schema(value[i], schema["items"], path + "[" + std::to_string(i) + "]");
    if (schema.contains("minItems") && value.is_array() &&
        value.size() < schema["minItems"].get<std::size_t>())
        throw SchemaError(path + ": too few items");
}

json load_schema(const std::string& name, const std::string& start_dir) {
    fs::path dir = fs::absolute(start_dir);
    for (int depth = 0; depth < 8; ++depth) {
        const fs::path candidate = dir / "schemas" / (name + ".schema.json");
        if (fs::exists(candidate)) {
            std::ifstream in(candidate);
            json schema;
            in >> schema;
            return schema;
        }
        if (!dir.has_parent_path() || dir.parent_path() == dir) break;
        dir = dir.parent_path();
    }
    throw SchemaError("schema not found: " + name);
}

void write_json_validated(const json& value, const std::string& schema_name,
                          const std::string& out_path) {
    validate_schema(value, load_schema(schema_name));
    std::ofstream out(out_path);
    if (!out) throw SchemaError("cannot open output file " + out_path);
    out << value.dump(2) << "\n";
}

void write_csv(const std::string& out_path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    for (const auto& row : rows)
        if (row.size() != header.size())
            throw SchemaError("CSV row arity does not match header");
    std::ofstream out(out_path);
    if (!out) throw SchemaError("cannot open output file " + out_path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "\n");
    out.precision(12);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "\n");
    }
}

}  // namespace qfhe::serialize
