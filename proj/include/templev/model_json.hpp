// JSON (de)serialization of model specs and the canonical model hash used
// by run manifests and grid-cache sidecars.
//
// Schema (field names fixed):
//   {"alpha":0.75,"p":1,"family":"power_law_rosinski","ell":1.0,"scale":1.0,"b":0.0}
//   {"alpha":0.5,"family":"tweedie","a":1.0,"c":1.0,"b":0.0}
#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "templev/common.hpp"
#include "templev/model.hpp"

namespace templev {

inline nlohmann::json model_to_json(const ModelSpec& spec) {
  nlohmann::json j;
  j["alpha"] = family_alpha(spec.tempering);
  j["b"] = spec.stable.b;
  if (const auto* pl = std::get_if<PowerLawRosinski>(&spec.tempering)) {
    j["family"] = "power_law_rosinski";
    j["p"] = pl->p;
    j["ell"] = pl->ell;
    j["scale"] = pl->scale;
  } else if (const auto* tw = std::get_if<TweedieExp>(&spec.tempering)) {
    j["family"] = "tweedie";
    j["a"] = tw->a;
    j["c"] = tw->c;
  } else {
    throw Error("model_to_json: user-radial tempering has no JSON form");
  }
  return j;
}

inline ModelSpec model_from_json(const nlohmann::json& j) {
  const std::string family = j.at("family").get<std::string>();
  const double alpha = j.at("alpha").get<double>();
  const double b = j.value("b", 0.0);
  if (family == "power_law_rosinski") {
    PowerLawRosinski pl;
    pl.alpha = alpha;
    pl.p = j.value("p", 1.0);
    pl.ell = j.at("ell").get<double>();
    pl.scale = j.value("scale", 1.0);
    return make_model(pl, b);
  }
  if (family == "tweedie") {
    TweedieExp tw;
    tw.alpha = alpha;
    tw.a = j.at("a").get<double>();
    tw.c = j.at("c").get<double>();
    return make_model(tw, b);
  }
  throw Error("model_from_json: unknown family '" + family + "'");
}

// Canonical serialization (nlohmann::json orders keys) and its FNV-1a hash.
inline std::string canonical_model_string(const ModelSpec& spec) {
  return model_to_json(spec).dump();
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::string model_hash(const ModelSpec& spec) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_model_string(spec))));
  return std::string(buf);
}

}  // namespace templev
