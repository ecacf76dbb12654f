// Copyright 2026 The vpjoin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VPJOIN_HARNESS_CONFIG_HPP_
#define VPJOIN_HARNESS_CONFIG_HPP_

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vpjoin/error.hpp"
#include "vpjoin/harness/experiment.hpp"
#include "vpjoin/harness/run.hpp"

// JSON forms of RunConfig and ExperimentConfig. Readers reject unknown keys
// and mistyped values; absent keys keep their defaults.
namespace vpjoin::harness {

using Json = nlohmann::json;

namespace detail {

class StrictObject {
 public:
  StrictObject(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  template <class T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    out = get<T>(key);
  }

  template <class T>
  void read(const std::string& key, std::optional<T>& out) {
    if (!has(key)) return;
    out = get<T>(key);
  }

  template <class T>
  T get(const std::string& key) const {
    const Json& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
          throw ConfigError("");
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("");
      }
      return v.get<T>();
    } catch (const std::exception&) {
      throw ConfigError(where_ + ": bad value for '" + key + "'");
    }
  }

  const Json& at(const std::string& key) const { return j_.at(key); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ConfigError(where_ + ": unknown key '" + it.key() + "'");
      }
    }
  }

 private:
  const Json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

inline std::vector<double> read_ratios(const Json& v, const std::string& what) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array() || v.empty()) {
    throw ConfigError(what + ": expected a number or a nonempty list");
  }
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(what + ": expected numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

inline Json ratios_json(const std::vector<double>& r) {
  return r.size() == 1 ? Json(r[0]) : Json(r);
}

}  // namespace detail

inline Json to_json(const SampleSpec& s) {
  return {{"hash_seed", s.hash_seed},
          {"bucket_count", s.bucket_count},
          {"bucket_index", s.bucket_index}};
}

inline SampleSpec sample_spec_from_json(const Json& j) {
  detail::StrictObject o(j, "sample_spec");
  SampleSpec s;
  o.read("hash_seed", s.hash_seed);
  o.read("bucket_count", s.bucket_count);
  o.read("bucket_index", s.bucket_index);
  o.finish();
  try {
    s.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("sample_spec: ") + e.what());
  }
  return s;
}

inline Json to_json(const RunConfig& c) {
  Json j = {
      {"algorithm", algorithm_name(c.algorithm)},
      {"dataset_size", c.dataset_size},
      {"providers", c.providers},
      {"ratio", detail::ratios_json(c.ratios)},
      {"bound", bound_name(c.sampling.bound)},
      {"two_sided", c.sampling.two_sided},
      {"heuristic_delta", c.heuristic_delta},
      {"confidence", c.confidence},
      {"privacy",
       {{"epsilon", c.privacy.epsilon},
        {"max_dummies", c.privacy.max_dummies},
        {"noise_in_hash", c.privacy.noise_in_hash}}},
      {"crypto", crypto_name(c.crypto)},
      {"key_bits", c.key_bits},
      {"group_bits", c.group_bits},
      {"psi_capacity", c.psi_capacity},
      {"seed", c.seed},
      {"repeats", c.repeats},
      {"normalize", c.normalize},
  };
  if (c.sampling.sample_ratio) j["sample_ratio"] = *c.sampling.sample_ratio;
  if (c.sampling.epsilon) j["sample_epsilon"] = *c.sampling.epsilon;
  if (c.sampling.delta) j["sample_delta"] = *c.sampling.delta;
  if (c.sample_spec) j["sample_spec"] = to_json(*c.sample_spec);
  if (c.data_seed) j["data_seed"] = *c.data_seed;
  return j;
}

inline RunConfig run_config_from_json(const Json& j) {
  detail::StrictObject o(j, "run config");
  RunConfig c;
  if (o.has("algorithm")) c.algorithm = parse_algorithm(o.get<std::string>("algorithm"));
  o.read("dataset_size", c.dataset_size);
  o.read("providers", c.providers);
  if (o.has("ratio")) c.ratios = detail::read_ratios(o.at("ratio"), "ratio");
  o.read("sample_ratio", c.sampling.sample_ratio);
  o.read("sample_epsilon", c.sampling.epsilon);
  o.read("sample_delta", c.sampling.delta);
  if (o.has("bound")) c.sampling.bound = parse_bound(o.get<std::string>("bound"));
  o.read("two_sided", c.sampling.two_sided);
  if (o.has("sample_spec")) c.sample_spec = sample_spec_from_json(o.at("sample_spec"));
  o.read("heuristic_delta", c.heuristic_delta);
  o.read("confidence", c.confidence);
  if (o.has("privacy")) {
    detail::StrictObject p(o.at("privacy"), "privacy");
    p.read("epsilon", c.privacy.epsilon);
    p.read("max_dummies", c.privacy.max_dummies);
    p.read("noise_in_hash", c.privacy.noise_in_hash);
    p.finish();
  }
  if (o.has("crypto")) c.crypto = parse_crypto(o.get<std::string>("crypto"));
  o.read("key_bits", c.key_bits);
  o.read("group_bits", c.group_bits);
  o.read("psi_capacity", c.psi_capacity);
  o.read("seed", c.seed);
  o.read("data_seed", c.data_seed);
  o.read("repeats", c.repeats);
  o.read("normalize", c.normalize);
  o.finish();
  return c;
}

inline Json to_json(const ExperimentConfig& c) {
  Json j = {
      {"experiment", experiment_name(c.kind)},
      {"dataset_size", c.dataset_size},
      {"providers", c.providers},
      {"ratio", c.ratio},
      {"repeats", c.repeats},
      {"seed", c.seed},
      {"epsilon", c.epsilon},
      {"heuristic_delta", c.heuristic_delta},
      {"confidence", c.confidence},
      {"adult_path", c.adult_path},
      {"sex", c.sex},
      {"normalize", c.normalize},
  };
  if (c.sample_ratios) j["sample_ratios"] = *c.sample_ratios;
  if (c.output) j["output"] = *c.output;
  if (c.algorithms) {
    Json a = Json::array();
    for (auto x : *c.algorithms) a.push_back(algorithm_name(x));
    j["algorithms"] = a;
  }
  return j;
}

inline ExperimentConfig experiment_config_from_json(const Json& j) {
  detail::StrictObject o(j, "experiment config");
  ExperimentConfig c;
  if (!o.has("experiment")) throw ConfigError("experiment config: missing 'experiment'");
  c.kind = parse_experiment(o.get<std::string>("experiment"));
  o.read("dataset_size", c.dataset_size);
  o.read("providers", c.providers);
  o.read("ratio", c.ratio);
  if (o.has("sample_ratios")) {
    c.sample_ratios = detail::read_ratios(o.at("sample_ratios"), "sample_ratios");
  }
  o.read("repeats", c.repeats);
  o.read("seed", c.seed);
  o.read("output", c.output);
  o.read("epsilon", c.epsilon);
  if (o.has("algorithms")) {
    const Json& a = o.at("algorithms");
    if (!a.is_array()) throw ConfigError("algorithms: expected a list");
    std::vector<Algorithm> algs;
    for (const auto& x : a) {
      if (!x.is_string()) throw ConfigError("algorithms: expected names");
      algs.push_back(parse_algorithm(x.get<std::string>()));
    }
    c.algorithms = algs;
  }
  o.read("heuristic_delta", c.heuristic_delta);
  o.read("confidence", c.confidence);
  o.read("adult_path", c.adult_path);
  o.read("sex", c.sex);
  o.read("normalize", c.normalize);
  o.finish();
  return c;
}

inline Json parse_json_text(const std::string& text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace vpjoin::harness

#endif  // VPJOIN_HARNESS_CONFIG_HPP_
