#pragma once
// Small structural JSON Schema checker covering the subset used by
// schemas/cli_output.schema.json: type, const, enum, properties, required,
// additionalProperties, items, oneOf/anyOf, minItems, minimum/maximum and
// local $refs into $defs.  Returns human-readable failure reasons.

#include <string>
#include <vector>

#include "json.hpp"

namespace juliadyn_cli {

class SchemaChecker {
 public:
  explicit SchemaChecker(nlohmann::json schema) : root_(std::move(schema)) {}

  bool validate(const nlohmann::json& instance, std::string* why = nullptr) const {
    std::string reason;
    bool ok = check(root_, instance, "$", reason);
    if (why) *why = reason;
    return ok;
  }

 private:
  nlohmann::json root_;

  static bool type_matches(const std::string& t, const nlohmann::json& v) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "number") return v.is_number();
    if (t == "integer") return v.is_number_integer();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    return false;
  }

  const nlohmann::json* resolve_ref(const std::string& ref) const {
    // Only local refs of the form "#/$defs/name" (or nested pointers).
    if (ref.rfind("#/", 0) != 0) return nullptr;
    const nlohmann::json* node = &root_;
    std::string rest = ref.substr(2);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      std::size_t next = rest.find('/', pos);
      std::string key = rest.substr(pos, next == std::string::npos ? std::string::npos
                                                                   : next - pos);
      if (!node->is_object() || !node->contains(key)) return nullptr;
      node = &(*node)[key];
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    return node;
  }

  bool check(const nlohmann::json& schema, const nlohmann::json& v,
             const std::string& path, std::string& reason) const {
    if (schema.is_boolean()) {
      if (!schema.get<bool>()) {
        reason = path + ": schema forbids any value";
        return false;
      }
      return true;
    }
    if (!schema.is_object()) return true;

    if (schema.contains("$ref")) {
      const nlohmann::json* target = resolve_ref(schema["$ref"].get<std::string>());
      if (!target) {
        reason = path + ": unresolvable $ref " + schema["$ref"].get<std::string>();
        return false;
      }
      if (!check(*target, v, path, reason)) return false;
    }

    if (schema.contains("type")) {
      const auto& t = schema["type"];
      bool ok = false;
      if (t.is_string()) {
        ok = type_matches(t.get<std::string>(), v);
      } else if (t.is_array()) {
        for (const auto& one : t)
          if (type_matches(one.get<std::string>(), v)) ok = true;
      }
      if (!ok) {
        reason = path + ": type mismatch (expected " + t.dump() + ")";
        return false;
      }
    }
    if (schema.contains("const") && v != schema["const"]) {
      reason = path + ": expected const " + schema["const"].dump();
      return false;
    }
    if (schema.contains("enum")) {
      bool ok = false;
      for (const auto& cand : schema["enum"])
        if (v == cand) ok = true;
      if (!ok) {
        reason = path + ": value not in enum";
        return false;
      }
    }
    if (v.is_number() && schema.contains("minimum") &&
        v.get<double>() < schema["minimum"].get<double>()) {
      reason = path + ": below minimum";
      return false;
    }
    if (v.is_number() && schema.contains("maximum") &&
        v.get<double>() > schema["maximum"].get<double>()) {
      reason = path + ": above maximum";
      return false;
    }
    if (v.is_object()) {
      if (schema.contains("required"))
        for (const auto& key : schema["required"])
          if (!v.contains(key.get<std::string>())) {
            reason = path + ": missing required key '" + key.get<std::string>() + "'";
            return false;
          }
      const auto props = schema.contains("properties") ? schema["properties"]
                                                       : nlohmann::json::object();
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (props.contains(it.key())) {
          if (!check(props[it.key()], it.value(), path + "." + it.key(), reason))
            return false;
        } else if (schema.contains("additionalProperties")) {
          const auto& ap = schema["additionalProperties"];
          if (ap.is_boolean() && !ap.get<bool>()) {
            reason = path + ": unexpected key '" + it.key() + "'";
            return false;
          }
          if (ap.is_object() &&
              !check(ap, it.value(), path + "." + it.key(), reason))
            return false;
        }
      }
    }
    if (v.is_array()) {
      if (schema.contains("minItems") &&
          v.size() < schema["minItems"].get<std::size_t>()) {
        reason = path + ": fewer than minItems elements";
        return false;
      }
      if (schema.contains("maxItems") &&
          v.size() > schema["maxItems"].get<std::size_t>()) {
        reason = path + ": more than maxItems elements";
        return false;
      }
      if (schema.contains("items")) {
        const auto& items = schema["items"];
        for (std::size_t i = 0; i < v.size(); ++i)
          if (!check(items, v[i], path + "[" + std::to_string(i) + "]", reason))
            return false;
      }
    }
    for (const char* combin : {"oneOf", "anyOf"}) {
      if (!schema.contains(combin)) continue;
      int hits = 0;
      std::string sub_reason;
      for (const auto& cand : schema[combin]) {
        std::string local;
        if (check(cand, v, path, local)) ++hits;
        else if (sub_reason.empty()) sub_reason = local;
      }
      bool ok = std::string(combin) == "oneOf" ? hits == 1 : hits >= 1;
      if (!ok) {
        reason = path + ": " + combin + " matched " + std::to_string(hits) +
                 " alternatives (e.g. " + sub_reason + ")";
        return false;
      }
    }
    return true;
  }
};

}  // namespace juliadyn_cli
