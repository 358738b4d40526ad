#include "rankone/spec_io.hpp"

#include "rankone/error.hpp"

#include <fstream>
#include <set>

namespace rankone {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw Error(ErrorKind::InvalidSpec, "unknown field '" + key + "' in " + where);
  }
}

BigInt big_from(const json& v, const std::string& what) {
  if (v.is_string()) return parse_bigint(v.get<std::string>());
  if (v.is_number_integer()) return BigInt(std::to_string(v.get<std::int64_t>()), 10);
  throw Error(ErrorKind::InvalidSpec, what + " must be a decimal string or integer");
}

}  // namespace

ConstructionSpec spec_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::InvalidSpec, "spec must be a JSON object");
  if (!doc.contains("kind")) throw Error(ErrorKind::InvalidSpec, "spec is missing 'kind'");
  const auto kind = doc.at("kind").get<std::string>();
  ConstructionSpec spec;
  if (kind == "explicit") {
    reject_unknown(doc, {"schema", "kind", "cuts", "spacers", "cyclic", "base_width", "max_stage"}, "explicit spec");
    spec.kind = ConstructionSpec::Kind::Explicit;
    if (!doc.contains("cuts") || !doc.contains("spacers")) {
      throw Error(ErrorKind::InvalidSpec, "explicit spec needs 'cuts' and 'spacers'");
    }
    for (const auto& c : doc.at("cuts")) {
      const BigInt r = big_from(c, "cut count");
      const auto r64 = to_int64(r);
      if (!r64) throw Error(ErrorKind::InvalidSpec, "cut count too large");
      spec.cuts.push_back(*r64);
    }
    for (const auto& row : doc.at("spacers")) {
      if (!row.is_array()) throw Error(ErrorKind::InvalidSpec, "spacer rows must be arrays");
      std::vector<BigInt> values;
      for (const auto& s : row) values.push_back(big_from(s, "spacer count"));
      spec.spacers.push_back(std::move(values));
    }
    spec.cyclic = doc.value("cyclic", false);
  } else if (kind == "family") {
    reject_unknown(doc, {"schema", "kind", "family", "params", "base_width", "max_stage"}, "family spec");
    spec.kind = ConstructionSpec::Kind::Family;
    if (!doc.contains("family")) throw Error(ErrorKind::InvalidSpec, "family spec needs 'family'");
    spec.family = parse_family(doc.at("family").get<std::string>());
    if (doc.contains("params")) {
      const auto& params = doc.at("params");
      if (!params.is_object()) throw Error(ErrorKind::InvalidSpec, "'params' must be an object");
      // None of the built-in families takes parameters.
      reject_unknown(params, {}, std::string(to_string(spec.family)) + " params");
    }
  } else {
    throw Error(ErrorKind::InvalidSpec, "unknown kind '" + kind + "'");
  }
  if (doc.contains("schema") && doc.at("schema") != kSchemaVersion) {
    throw Error(ErrorKind::InvalidSpec, "unsupported schema " + doc.at("schema").dump());
  }
  if (doc.contains("base_width")) {
    const auto& w = doc.at("base_width");
    spec.base_width = w.is_string() ? parse_rational(w.get<std::string>()) : Rational(big_from(w, "base_width"));
  }
  if (doc.contains("max_stage")) spec.max_stage = doc.at("max_stage").get<int>();
  spec.validate();
  return spec;
}

ConstructionSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open spec file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidSpec, std::string("malformed JSON: ") + e.what());
  }
  try {
    return spec_from_json(doc);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidSpec, std::string("bad field type: ") + e.what());
  }
}

json spec_to_json(const ConstructionSpec& spec) {
  json doc;
  doc["schema"] = kSchemaVersion;
  if (spec.kind == ConstructionSpec::Kind::Family) {
    doc["kind"] = "family";
    doc["family"] = to_string(spec.family);
    doc["params"] = json::object();
  } else {
    doc["kind"] = "explicit";
    doc["cuts"] = spec.cuts;
    json rows = json::array();
    for (const auto& row : spec.spacers) {
      json r = json::array();
      for (const auto& s : row) r.push_back(s.get_str());
      rows.push_back(std::move(r));
    }
    doc["spacers"] = std::move(rows);
    if (spec.cyclic) doc["cyclic"] = true;
  }
  doc["base_width"] = to_string(spec.base_width);
  doc["max_stage"] = spec.max_stage;
  return doc;
}

}  // namespace rankone
