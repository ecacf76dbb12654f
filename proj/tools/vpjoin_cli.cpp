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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vpjoin/bounds.hpp"
#include "vpjoin/dataset.hpp"
#include "vpjoin/error.hpp"
#include "vpjoin/harness/config.hpp"
#include "vpjoin/harness/experiment.hpp"
#include "vpjoin/harness/run.hpp"
#include "vpjoin/synthetic.hpp"

namespace {

using namespace vpjoin;
using namespace vpjoin::harness;

std::ofstream open_file(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  return out;
}

// Writes to the file at path, or stdout when path is empty or "-".
template <class Fn>
void emit(const std::string& path, Fn fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  auto out = open_file(path);
  fn(out);
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

struct GenDataArgs {
  std::uint64_t n = 100000;
  std::uint64_t k = 10;
  std::vector<double> ratios{0.7};
  std::uint64_t seed = 1;
  std::string out_dir = ".";
};

void gen_data(const GenDataArgs& a) {
  SyntheticSpec spec{a.n, a.k, a.ratios, a.seed};
  auto datasets = generate_synthetic(spec);
  std::filesystem::path dir(a.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    const auto path = (dir / ("provider_" + std::to_string(i) + ".csv")).string();
    emit(path, [&](std::ostream& os) { write_dataset_csv(os, datasets[i]); });
  }
}

struct SampleSizeArgs {
  double epsilon = 0.01;
  double delta = 0.01;
  std::optional<std::uint64_t> n;
  std::string bound = "hoeffding";
  bool two_sided = false;
};

void sample_size(const SampleSizeArgs& a) {
  const auto kind = parse_bound(a.bound);
  const double d = a.two_sided ? bounds::one_sided_delta(a.delta) : a.delta;
  std::uint64_t m = 0;
  double conf = 0.0;
  if (kind == BoundKind::kSerfling) {
    if (!a.n) throw ConfigError("serfling needs --dataset-size");
    m = bounds::sample_size_serfling(a.epsilon, d, *a.n);
    conf = bounds::serfling_confidence(m, a.epsilon, *a.n);
  } else {
    m = bounds::sample_size_hoeffding(a.epsilon, d);
    conf = bounds::hoeffding_confidence(m, a.epsilon);
    if (a.n && m > *a.n) {
      m = *a.n;
      conf = bounds::hoeffding_confidence(m, a.epsilon);
    }
  }
  if (a.two_sided) conf = bounds::two_sided(conf);
  std::cout << "bound,epsilon,delta,N,m,confidence\n"
            << a.bound << ',' << format_number(a.epsilon) << ','
            << format_number(a.delta) << ',' << (a.n ? std::to_string(*a.n) : "")
            << ',' << m << ',' << format_number(conf) << '\n';
}

struct RunArgs {
  std::string config;
  std::string write_config;
  std::string output;
  std::string trace;
  std::string transcript;
  std::string algorithm;
  std::uint64_t n = 0, k = 0, seed = 0, data_seed = 0, repeats = 0;
  std::uint64_t max_dummies = 0, key_bits = 0, group_bits = 0, capacity = 0;
  std::vector<double> ratios;
  double sample_ratio = 0, epsilon = 0, delta = 0, sample_epsilon = 0,
         sample_delta = 0, confidence = 0;
  std::string bound, crypto;
  bool two_sided = false, normalize = false, noise_in_hash = false;
  std::string spec;
};

SampleSpec parse_spec(const std::string& text) {
  std::uint64_t v[3];
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const auto end = text.find(',', pos);
    if ((i < 2) == (end == std::string::npos)) {
      throw ConfigError("--sample-spec expects hash_seed,bucket_count,bucket_index");
    }
    const std::string part = text.substr(pos, end == std::string::npos ? end : end - pos);
    try {
      std::size_t used = 0;
      v[i] = std::stoull(part, &used);
      if (used != part.size()) throw ConfigError("");
    } catch (const std::exception&) {
      throw ConfigError("--sample-spec: bad number '" + part + "'");
    }
    pos = end + 1;
  }
  SampleSpec s{v[0], v[1], v[2]};
  try {
    s.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("--sample-spec: ") + e.what());
  }
  return s;
}

void run_command(const RunArgs& a, const CLI::App& cmd) {
  auto given = [&](const char* flag) { return cmd.count(flag) > 0; };
  RunConfig c = a.config.empty() ? RunConfig{}
                                 : run_config_from_json(read_json_file(a.config));
  if (given("--algorithm")) c.algorithm = parse_algorithm(a.algorithm);
  if (given("--dataset-size")) c.dataset_size = a.n;
  if (given("--providers")) c.providers = a.k;
  if (given("--ratio")) c.ratios = a.ratios;
  if (given("--seed")) c.seed = a.seed;
  if (given("--data-seed")) c.data_seed = a.data_seed;
  if (given("--repeats")) c.repeats = a.repeats;
  if (given("--bound")) c.sampling.bound = parse_bound(a.bound);
  if (given("--two-sided")) c.sampling.two_sided = a.two_sided;
  if (given("--normalize")) c.normalize = a.normalize;
  if (given("--confidence")) c.confidence = a.confidence;
  if (given("--max-dummies")) c.privacy.max_dummies = a.max_dummies;
  if (given("--noise-in-hash")) c.privacy.noise_in_hash = a.noise_in_hash;
  if (given("--crypto")) c.crypto = parse_crypto(a.crypto);
  if (given("--key-bits")) c.key_bits = a.key_bits;
  if (given("--group-bits")) c.group_bits = a.group_bits;
  if (given("--psi-capacity")) c.psi_capacity = a.capacity;
  if (given("--sample-spec")) c.sample_spec = parse_spec(a.spec);
  if (given("--sample-ratio")) {
    c.sampling.sample_ratio = a.sample_ratio;
    c.sampling.epsilon.reset();
    c.sampling.delta.reset();
  }
  if (given("--sample-epsilon")) c.sampling.epsilon = a.sample_epsilon;
  if (given("--sample-delta")) c.sampling.delta = a.sample_delta;

  // --epsilon / --delta mean different things per algorithm.
  const std::string name = algorithm_name(c.algorithm);
  if (given("--epsilon")) {
    if (c.algorithm == Algorithm::kPrivateHeuristic) {
      c.privacy.epsilon = a.epsilon;
    } else if (uses_sample(c.algorithm)) {
      c.sampling.epsilon = a.epsilon;
    } else {
      throw ConfigError("--epsilon does not apply to " + name);
    }
  }
  if (given("--delta")) {
    if (is_heuristic(c.algorithm)) {
      c.heuristic_delta = a.delta;
    } else if (uses_sample(c.algorithm)) {
      c.sampling.delta = a.delta;
    } else {
      throw ConfigError("--delta does not apply to " + name);
    }
  }
  if (!a.trace.empty() && !is_heuristic(c.algorithm)) {
    throw ConfigError("--emit-trace needs a heuristic algorithm, not " + name);
  }
  if (!a.transcript.empty() && !uses_crypto(c.algorithm)) {
    throw ConfigError("--transcript needs private-heuristic or sample-mpc, not " + name);
  }
  c.validate();
  if (!a.write_config.empty()) write_json_file(a.write_config, to_json(c));

  // Open every output before running so that bad paths fail fast.
  std::optional<std::ofstream> trace_out, transcript_out;
  if (!a.trace.empty()) trace_out.emplace(open_file(a.trace));
  if (!a.transcript.empty()) transcript_out.emplace(open_file(a.transcript));
  std::optional<std::ofstream> main_out;
  if (!a.output.empty() && a.output != "-") main_out.emplace(open_file(a.output));

  const auto records = run_synthetic(c, transcript_out.has_value());
  std::ostream& os = main_out ? *main_out : std::cout;
  write_run_csv(os, c, records);
  os.flush();
  if (trace_out && records.front().trace) {
    write_trace_csv(*trace_out, *records.front().trace);
  }
  if (transcript_out) write_transcript(*transcript_out, records.front().transcript);
  for (auto* f : {main_out ? &*main_out : nullptr, trace_out ? &*trace_out : nullptr,
                  transcript_out ? &*transcript_out : nullptr}) {
    if (f && !f->flush()) throw IoError("write failed");
  }
}

struct ExperimentArgs {
  std::string config, write_config, output, kind, adult_path, sex;
  std::uint64_t n = 0, k = 0, repeats = 0, seed = 0;
  double ratio = 0, epsilon = 0, delta = 0, confidence = 0;
  std::vector<double> sample_ratios;
  std::vector<std::string> algorithms;
  bool normalize = false;
};

void experiment_command(const ExperimentArgs& a, const CLI::App& cmd) {
  auto given = [&](const char* flag) { return cmd.count(flag) > 0; };
  ExperimentConfig c;
  if (!a.config.empty()) {
    c = experiment_config_from_json(read_json_file(a.config));
  } else if (!given("--kind")) {
    throw ConfigError("experiment needs --kind or --config");
  }
  if (given("--kind")) c.kind = parse_experiment(a.kind);
  if (given("--dataset-size")) c.dataset_size = a.n;
  if (given("--providers")) c.providers = a.k;
  if (given("--ratio")) c.ratio = a.ratio;
  if (given("--sample-ratios")) c.sample_ratios = a.sample_ratios;
  if (given("--repeats")) c.repeats = a.repeats;
  if (given("--seed")) c.seed = a.seed;
  if (given("--epsilon")) c.epsilon = a.epsilon;
  if (given("--delta")) c.heuristic_delta = a.delta;
  if (given("--confidence")) c.confidence = a.confidence;
  if (given("--adult-path")) c.adult_path = a.adult_path;
  if (given("--sex")) c.sex = a.sex;
  if (given("--normalize")) c.normalize = a.normalize;
  if (given("--algorithms")) {
    std::vector<Algorithm> algs;
    for (const auto& s : a.algorithms) algs.push_back(parse_algorithm(s));
    c.algorithms = algs;
  }
  if (given("--output")) {
    if (a.output == "-") {
      c.output.reset();
    } else {
      c.output = a.output;
    }
  }
  c.validate();
  if (!a.write_config.empty()) write_json_file(a.write_config, to_json(c));
  const auto rows = run_experiment(c);
  if (!c.output) {
    write_stat_csv(std::cout, rows);
    std::cout.flush();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vpjoin: intersection cardinality over vertically partitioned data"};
  app.require_subcommand(1);

  GenDataArgs g;
  auto* gen = app.add_subcommand("gen-data", "write synthetic provider datasets as CSV");
  gen->add_option("--dataset-size,-N", g.n, "records per provider");
  gen->add_option("--providers,-k", g.k, "number of providers");
  gen->add_option("--ratio,-r", g.ratios, "predicate ratio, one or one per provider")
      ->delimiter(',');
  gen->add_option("--seed", g.seed, "generator seed");
  gen->add_option("--out-dir", g.out_dir, "output directory");

  SampleSizeArgs s;
  std::uint64_t s_n = 0;
  auto* ss = app.add_subcommand("sample-size", "minimal sample size for (epsilon, delta)");
  ss->add_option("--epsilon", s.epsilon, "additive error")->required();
  ss->add_option("--delta", s.delta, "failure probability")->required();
  ss->add_option("--dataset-size,-N", s_n, "population size (required by serfling)");
  ss->add_option("--bound", s.bound, "hoeffding or serfling");
  ss->add_flag("--two-sided", s.two_sided, "bound both tails");

  RunArgs r;
  auto* run = app.add_subcommand("run", "seeded runs of one algorithm, one CSV row per run");
  run->add_option("--config", r.config, "JSON run configuration");
  run->add_option("--write-config", r.write_config, "write the effective configuration");
  run->add_option("--output,-o", r.output, "CSV path, default stdout");
  run->add_option("--algorithm,-a", r.algorithm,
                  "naive-seq, naive-par, sample-seq, sample-par, heuristic, "
                  "heuristic-sample, private-heuristic, sample-mpc");
  run->add_option("--dataset-size,-N", r.n, "records per provider");
  run->add_option("--providers,-k", r.k, "number of providers");
  run->add_option("--ratio,-r", r.ratios, "predicate ratio, one or one per provider")
      ->delimiter(',');
  run->add_option("--sample-ratio", r.sample_ratio, "sample size as a fraction of N");
  run->add_option("--epsilon", r.epsilon,
                  "sample error (sampled), privacy epsilon (private-heuristic)");
  run->add_option("--delta", r.delta,
                  "sample failure probability (sampled), stopping gap (heuristics)");
  run->add_option("--sample-epsilon", r.sample_epsilon, "sample error for any algorithm");
  run->add_option("--sample-delta", r.sample_delta, "sample failure probability for any algorithm");
  run->add_option("--bound", r.bound, "hoeffding or serfling sample sizing");
  run->add_flag("--two-sided", r.two_sided, "size the sample for both tails");
  run->add_option("--sample-spec", r.spec, "fixed bucket: hash_seed,bucket_count,bucket_index");
  run->add_option("--confidence", r.confidence, "confidence for heuristic-sample");
  run->add_option("--max-dummies", r.max_dummies, "dummy cap for the noisy PSI-CA");
  run->add_flag("--noise-in-hash", r.noise_in_hash, "perturb the id hash (not implemented)");
  run->add_option("--crypto", r.crypto, "plain or modular");
  run->add_option("--key-bits", r.key_bits, "Paillier modulus bits");
  run->add_option("--group-bits", r.group_bits, "commutative group bits (768, 1024)");
  run->add_option("--psi-capacity", r.capacity, "largest PSI-CA set");
  run->add_option("--seed", r.seed, "base seed; run j uses seed + j");
  run->add_option("--data-seed", r.data_seed, "population seed, default the base seed");
  run->add_option("--repeats,-R", r.repeats, "number of runs");
  run->add_flag("--normalize", r.normalize, "divide errors by N instead of the exact size");
  run->add_option("--emit-trace", r.trace, "heuristic bound trace CSV (first run)");
  run->add_option("--transcript", r.transcript, "protocol message log (first run)");

  ExperimentArgs e;
  auto* exp = app.add_subcommand("experiment", "repeated runs aggregated to mean/std rows");
  exp->add_option("--config", e.config, "JSON experiment configuration");
  exp->add_option("--write-config", e.write_config, "write the effective configuration");
  exp->add_option("--kind", e.kind,
                  "bound-comparison, error-vs-sample-size, algorithm-comparison, "
                  "heuristic-convergence, adult");
  exp->add_option("--output,-o", e.output, "CSV path, default stdout");
  exp->add_option("--dataset-size,-N", e.n, "records per provider");
  exp->add_option("--providers,-k", e.k, "number of providers");
  exp->add_option("--ratio,-r", e.ratio, "predicate ratio");
  exp->add_option("--sample-ratios", e.sample_ratios, "sample ratio grid")->delimiter(',');
  exp->add_option("--repeats,-R", e.repeats, "runs per point");
  exp->add_option("--seed", e.seed, "base seed");
  exp->add_option("--epsilon", e.epsilon, "bound-comparison error");
  exp->add_option("--delta", e.delta, "heuristic stopping gap");
  exp->add_option("--confidence", e.confidence, "confidence for heuristic-sample");
  exp->add_option("--algorithms", e.algorithms, "algorithms to compare")->delimiter(',');
  exp->add_option("--adult-path", e.adult_path, "UCI adult.data file");
  exp->add_option("--sex", e.sex, "Male or Female");
  exp->add_flag("--normalize", e.normalize, "divide errors by N instead of the exact size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    std::cerr << "vpjoin: error: " << err.what() << '\n';
    return 2;
  }

  try {
    if (*gen) {
      gen_data(g);
    } else if (*ss) {
      if (ss->count("--dataset-size")) s.n = s_n;
      sample_size(s);
    } else if (*run) {
      run_command(r, *run);
    } else if (*exp) {
      experiment_command(e, *exp);
    }
  } catch (const ConfigError& err) {
    std::cerr << "vpjoin: error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "vpjoin: error: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
