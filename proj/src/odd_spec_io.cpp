#include "oddforge/odd_spec_io.hpp"

#include <json.hpp>

#include "io_util.hpp"

namespace oddforge {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(where + ": missing key '" + key + "'");
  return *it;
}

double require_number(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number()) throw FormatError(where + ": '" + key + "' must be a number");
  return v.get<double>();
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) throw FormatError(where + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

ParameterSpec parse_parameter(const json& obj, std::size_t index) {
  const std::string where = "parameters[" + std::to_string(index) + "]";
  if (!obj.is_object()) throw FormatError(where + " must be an object");
  ParameterSpec p;
  p.name = require_string(obj, "name", where);
  auto kind = parse_parameter_kind(require_string(obj, "kind", where));
  if (!kind) throw FormatError(where + ": unknown kind");
  p.kind = *kind;
  auto unit = parse_unit(require_string(obj, "unit", where));
  if (!unit) throw FormatError(where + ": unknown unit");
  p.unit = *unit;
  if (p.kind == ParameterKind::Continuous) {
    p.range = {require_number(obj, "min", where), require_number(obj, "max", where)};
  } else {
    const json& values = require(obj, "values", where);
    if (!values.is_array()) throw FormatError(where + ": 'values' must be an array");
    for (const auto& v : values) {
      if (!v.is_string()) throw FormatError(where + ": categorical values must be strings");
      p.values.push_back(v.get<std::string>());
    }
  }
  return p;
}

}  // namespace

OddSpec parse_spec(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("ODD spec is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("ODD spec must be a JSON object");

  const json& version = require(doc, "version", "spec");
  if (!version.is_number_integer()) throw FormatError("spec: 'version' must be an integer");

  const json& parent = require(doc, "parent", "spec");
  std::optional<int> parent_version;
  if (parent.is_number_integer()) {
    parent_version = parent.get<int>();
  } else if (!parent.is_null()) {
    throw FormatError("spec: 'parent' must be an integer or null");
  }

  const json& params = require(doc, "parameters", "spec");
  if (!params.is_array()) throw FormatError("spec: 'parameters' must be an array");
  std::vector<ParameterSpec> parameters;
  for (std::size_t i = 0; i < params.size(); ++i) parameters.push_back(parse_parameter(params[i], i));

  const json& flags = require(doc, "restrictions", "spec");
  if (!flags.is_array()) throw FormatError("spec: 'restrictions' must be an array");
  std::vector<std::string> restrictions;
  for (const auto& f : flags) {
    if (!f.is_string()) throw FormatError("spec: restrictions must be strings");
    restrictions.push_back(f.get<std::string>());
  }
  return OddSpec(version.get<int>(), std::move(parameters), std::move(restrictions), parent_version);
}

std::string serialize_spec(const OddSpec& spec) {
  nlohmann::ordered_json doc;
  doc["version"] = spec.version();
  doc["parent"] = spec.parent_version() ? nlohmann::ordered_json(*spec.parent_version()) : nullptr;
  auto params = nlohmann::ordered_json::array();
  for (const auto& p : spec.parameters()) {
    nlohmann::ordered_json obj;
    obj["name"] = p.name;
    obj["kind"] = std::string(to_string(p.kind));
    obj["unit"] = std::string(to_string(p.unit));
    if (p.kind == ParameterKind::Continuous) {
      obj["min"] = detail::json_number<nlohmann::ordered_json>(p.range.min);
      obj["max"] = detail::json_number<nlohmann::ordered_json>(p.range.max);
    } else {
      obj["values"] = p.values;
    }
    params.push_back(std::move(obj));
  }
  doc["parameters"] = std::move(params);
  doc["restrictions"] = spec.restrictions();
  return doc.dump(2) + "\n";
}

OddSpec load_spec(const std::filesystem::path& path) { return parse_spec(detail::read_text_file(path)); }

void save_spec(const OddSpec& spec, const std::filesystem::path& path) {
  detail::write_text_file(path, serialize_spec(spec));
}

}  // namespace oddforge
