#pragma once

// Validator for the JSON Schema subset used by schemas/: type, const, enum,
// required, properties, additionalProperties, items, minItems, maxItems,
// minimum, exclusiveMinimum, anyOf, oneOf and $ref (local "#/definitions/x"
// or a sibling file name).

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace qrlab::test {

class SchemaValidator {
 public:
  using json = nlohmann::json;

  explicit SchemaValidator(std::filesystem::path dir) : dir_(std::move(dir)) {}

  // Empty on success, otherwise one message per violation.
  std::vector<std::string> validate(const std::string& schema_file, const json& doc) const {
    std::vector<std::string> errors;
    const json root = load(schema_file);
    check(root, root, doc, "$", errors);
    return errors;
  }

 private:
  json load(const std::string& file) const {
    std::ifstream in(dir_ / file);
    if (!in) throw std::runtime_error("schema not found: " + file);
    return json::parse(in);
  }

  static bool has_type(const json& doc, const std::string& type) {
    if (type == "object") return doc.is_object();
    if (type == "array") return doc.is_array();
    if (type == "string") return doc.is_string();
    if (type == "number") return doc.is_number();
    if (type == "integer") return doc.is_number_integer() || (doc.is_number_float() && doc.get<double>() == std::floor(doc.get<double>()));
    if (type == "boolean") return doc.is_boolean();
    if (type == "null") return doc.is_null();
    return false;
  }

  bool ok(const json& root, const json& schema, const json& doc) const {
    std::vector<std::string> scratch;
    check(root, schema, doc, "", scratch);
    return scratch.empty();
  }

  void check(const json& root, const json& schema, const json& doc, const std::string& at,
             std::vector<std::string>& errors) const {
    if (schema.contains("$ref")) {
      const std::string ref = schema["$ref"];
      if (ref.rfind("#/definitions/", 0) == 0) {
        check(root, root["definitions"][ref.substr(14)], doc, at, errors);
      } else {
        const json other = load(ref);
        check(other, other, doc, at, errors);
      }
    }
    if (schema.contains("type") && !has_type(doc, schema["type"])) {
      errors.push_back(at + ": expected " + schema["type"].get<std::string>());
      return;
    }
    if (schema.contains("const") && doc != schema["const"]) errors.push_back(at + ": expected " + schema["const"].dump());
    if (schema.contains("enum")) {
      bool found = false;
      for (const auto& v : schema["enum"]) found = found || v == doc;
      if (!found) errors.push_back(at + ": " + doc.dump() + " not in enum");
    }
    if (doc.is_number()) {
      const double x = doc.get<double>();
      if (schema.contains("minimum") && x < schema["minimum"].get<double>()) errors.push_back(at + ": below minimum");
      if (schema.contains("exclusiveMinimum") && !(x > schema["exclusiveMinimum"].get<double>()))
        errors.push_back(at + ": not above exclusiveMinimum");
    }
    if (doc.is_object()) {
      if (schema.contains("required"))
        for (const auto& key : schema["required"])
          if (!doc.contains(key.get<std::string>())) errors.push_back(at + ": missing " + key.get<std::string>());
      for (const auto& [key, value] : doc.items()) {
        const std::string child = at + "." + key;
        if (schema.contains("properties") && schema["properties"].contains(key)) {
          check(root, schema["properties"][key], value, child, errors);
        } else if (schema.contains("additionalProperties")) {
          const auto& extra = schema["additionalProperties"];
          if (extra.is_boolean()) {
            if (!extra.get<bool>()) errors.push_back(child + ": unexpected property");
          } else {
            check(root, extra, value, child, errors);
          }
        }
      }
    }
    if (doc.is_array()) {
      if (schema.contains("minItems") && doc.size() < schema["minItems"].get<std::size_t>())
        errors.push_back(at + ": too few items");
      if (schema.contains("maxItems") && doc.size() > schema["maxItems"].get<std::size_t>())
        errors.push_back(at + ": too many items");
      if (schema.contains("items"))
        for (std::size_t i = 0; i < doc.size(); ++i)
          check(root, schema["items"], doc[i], at + "[" + std::to_string(i) + "]", errors);
    }
    if (schema.contains("anyOf")) {
      bool any = false;
      for (const auto& s : schema["anyOf"]) any = any || ok(root, s, doc);
      if (!any) errors.push_back(at + ": matches no anyOf branch");
    }
    if (schema.contains("oneOf")) {
      int matches = 0;
      for (const auto& s : schema["oneOf"]) matches += ok(root, s, doc) ? 1 : 0;
      if (matches != 1) errors.push_back(at + ": matches " + std::to_string(matches) + " oneOf branches");
    }
  }

  std::filesystem::path dir_;
};

}  // namespace qrlab::test
