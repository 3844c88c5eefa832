// Acceptance suite: runs every criterion and prints one pass/fail line each.
// Exits nonzero if any criterion fails.

#include "greenbench/report.hpp"

#include "greenbench/errors.hpp"
#include "helpers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

using namespace greenbench;

namespace {

struct Failure {
  std::string detail;
};

using CheckFn = std::function<void(std::vector<std::string> &)>;

void expect(std::vector<std::string> &failures, bool ok, const std::string &what) {
  if (!ok) {
    failures.push_back(what);
  }
}

// --------------------------------------------------------------------------
// 1. quantization round-trip properties over 10,000 random tensors
// --------------------------------------------------------------------------
void criterion_quantize_properties(std::vector<std::string> &failures) {
  std::mt19937_64 gen(20260824);
  std::uniform_real_distribution<double> value_dist(-100.0, 100.0);
  const int bit_choices[3] = {2, 4, 8};

  std::size_t bound_violations = 0, range_violations = 0, monotonic_violations = 0,
              idempotence_violations = 0;

  for (int iter = 0; iter < 10000; ++iter) {
    const std::size_t n = 1 + gen() % 10000;
    const int bits = bit_choices[gen() % 3];
    WeightTensor w;
    w.shape = {n};
    w.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      w.values[i] = static_cast<float>(value_dist(gen));
    }

    const QuantizedTensor q = quantize(w, bits);
    const WeightTensor back = dequantize(q);

    const auto [lo, hi] = std::minmax_element(w.values.begin(), w.values.end());
    const double slack =
        q.delta / 2.0 + 4.0 * std::numeric_limits<float>::epsilon() * std::abs(*hi - *lo);
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(back.values[i] - w.values[i]) > slack) {
        ++bound_violations;
      }
      if (q.codes[i] > q.max_code()) {
        ++range_violations;
      }
    }

    // monotonicity: codes sorted by value must be non-decreasing
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return w.values[a] < w.values[b]; });
    for (std::size_t i = 1; i < n; ++i) {
      if (q.codes[order[i - 1]] > q.codes[order[i]]) {
        ++monotonic_violations;
      }
    }

    const QuantizedTensor again = quantize(back, bits);
    if (again.codes != q.codes || again.delta != q.delta || again.minimum != q.minimum) {
      ++idempotence_violations;
    }
  }

  expect(failures, bound_violations == 0,
         "round-trip bound violations: " + std::to_string(bound_violations));
  expect(failures, range_violations == 0,
         "code range violations: " + std::to_string(range_violations));
  expect(failures, monotonic_violations == 0,
         "monotonicity violations: " + std::to_string(monotonic_violations));
  expect(failures, idempotence_violations == 0,
         "idempotence violations: " + std::to_string(idempotence_violations));
}

// --------------------------------------------------------------------------
// 2. published CO2 columns reproduce the per-model reductions
// --------------------------------------------------------------------------
void criterion_reduction_arithmetic(std::vector<std::string> &failures) {
  struct Row {
    const char *model;
    double before, after, expected_pct;
  };
  const Row rows[] = {
      {"Llama 3.2", 0.012, 0.005, 58.3},    {"Phi 3.2", 0.012, 0.007, 41.7},
      {"Qwen", 0.009, 0.004, 55.6},         {"Mistral-small", 0.020, 0.015, 25.0},
      {"Llava-Llama 3", 0.014, 0.006, 57.1},
  };
  double max_reduction = 0.0;
  for (const Row &row : rows) {
    BenchmarkRun before, after;
    before.config.model_name = row.model;
    before.corpus = after.corpus = {"published", 5842, 0};
    after.config.model_name = row.model;
    before.carbon.kg_co2e = row.before;
    after.carbon.kg_co2e = row.after;
    const ComparisonReport report = compare(before, after);
    const double hand = 100.0 * (row.before - row.after) / row.before;
    expect(failures, std::abs(report.co2_reduction_pct - hand) < 1e-9,
           std::string(row.model) + ": compare() disagrees with hand computation");
    expect(failures, std::abs(report.co2_reduction_pct - row.expected_pct) <= 0.1,
           std::string(row.model) + ": reduction " + std::to_string(report.co2_reduction_pct) +
               " not within 0.1pp of " + std::to_string(row.expected_pct));
    max_reduction = std::max(max_reduction, report.co2_reduction_pct);
  }
  expect(failures, max_reduction >= 45.0, "max reduction below 45%");
}

// --------------------------------------------------------------------------
// 3. F1 spot check: P=1.00, R=0.84 -> 0.913, rendering as "0.91"
// --------------------------------------------------------------------------
void criterion_f1_spot_check(std::vector<std::string> &failures) {
  std::vector<std::pair<Label, Label>> pairs;
  for (int i = 0; i < 84; ++i) {
    pairs.emplace_back(Label::Positive, Label::Positive);
  }
  for (int i = 0; i < 16; ++i) {
    pairs.emplace_back(Label::Positive, Label::Negative);
  }
  const MetricsReport report = metrics(confusion(pairs));
  expect(failures, report.per_class[0].precision == 1.0, "precision != 1.00");
  expect(failures, std::abs(report.per_class[0].recall - 0.84) < 1e-12, "recall != 0.84");
  expect(failures, std::abs(report.per_class[0].f1 - 0.913) <= 0.001,
         "F1 " + std::to_string(report.per_class[0].f1) + " not 0.913 +/- 0.001");
  expect(failures, format_rounded(report.per_class[0].f1, 2) == "0.91",
         "F1 renders as " + format_rounded(report.per_class[0].f1, 2));
}

// --------------------------------------------------------------------------
// 4. CF = E * alpha exactness and linearity
// --------------------------------------------------------------------------
void criterion_carbon_exactness(std::vector<std::string> &failures) {
  EnergyReading e;
  e.kwh = 0.01;
  e.joules = 0.01 * 3.6e6;
  const EmissionFactor alpha{"test-grid", 400.0, EmissionScope::Scope2};
  const double kg = footprint(e, alpha).kg_co2e;
  expect(failures, std::abs(kg - 0.004) / 0.004 <= 1e-12,
         "footprint(0.01 kWh, 400) = " + std::to_string(kg) + ", want 0.004");

  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> a_dist(1.0, 2000.0);
  auto reading = [](double kwh) {
    EnergyReading r;
    r.kwh = kwh;
    r.joules = kwh * 3.6e6;
    return r;
  };
  // Linearity is a statement about real-number energies, so the vectors are
  // chosen so that E1 + E2 is itself exactly representable (26-bit
  // significands, binades within 2^10 of each other) and the right-hand sum
  // of the two footprints is accumulated exactly (long double holds the sum
  // of two such doubles without rounding).  That isolates footprint()'s own
  // rounding, which the invariant bounds at 1 ulp.
  auto random_energy = [&gen]() {
    const std::uint64_t mantissa = (1ull << 25) + gen() % (1ull << 25);
    const int exponent = static_cast<int>(gen() % 11);
    return std::ldexp(static_cast<double>(mantissa), exponent - 26);
  };
  std::size_t additivity_violations = 0, scaling_violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const double e1 = random_energy(), e2 = random_energy();
    const EmissionFactor a{"x", a_dist(gen), EmissionScope::Scope2};
    const double lhs = footprint(reading(e1 + e2), a).kg_co2e;
    const long double rhs = static_cast<long double>(footprint(reading(e1), a).kg_co2e) +
                            static_cast<long double>(footprint(reading(e2), a).kg_co2e);
    const double hi = std::max(lhs, static_cast<double>(rhs));
    const double ulp = std::nextafter(hi, std::numeric_limits<double>::infinity()) - hi;
    if (std::abs(static_cast<long double>(lhs) - rhs) >
        static_cast<long double>(ulp)) {
      ++additivity_violations;
    }
    EmissionFactor doubled = a;
    doubled.gco2_per_kwh *= 2.0;
    if (footprint(reading(e1), doubled).kg_co2e != 2.0 * footprint(reading(e1), a).kg_co2e) {
      ++scaling_violations;
    }
  }
  expect(failures, additivity_violations == 0,
         "additivity beyond 1 ulp: " + std::to_string(additivity_violations) + " of 1000");
  expect(failures, scaling_violations == 0,
         "alpha-doubling not exact: " + std::to_string(scaling_violations) + " of 1000");
}

// --------------------------------------------------------------------------
// 5. energy integration fixtures
// --------------------------------------------------------------------------
void criterion_energy_fixtures(std::vector<std::string> &failures) {
  const EnergyReading ramp = integrate_trace({{0, 0.0}, {2000, 10.0}});
  expect(failures, ramp.joules == 10.0,
         "ramp trapezoid = " + std::to_string(ramp.joules) + ", want exactly 10 J");

  const EnergyReading constant = integrate_trace({{0, 10.0}, {3600000, 10.0}});
  expect(failures, constant.kwh == 0.01,
         "constant 10 W over 3600 s = " + std::to_string(constant.kwh) + " kWh, want 0.01");

  const std::uint64_t range = 1000000000;
  const double wrap = counter_delta_joules({range - 100, range}, {400, range});
  expect(failures, std::abs(wrap - 501e-6) <= 1e-18 && wrap > 0.0,
         "wraparound delta = " + std::to_string(wrap) + ", want 501e-6 J");
}

// --------------------------------------------------------------------------
// 6. metrics vs independent brute-force oracle on 500 random pair sets
// --------------------------------------------------------------------------
void criterion_metrics_oracle(std::vector<std::string> &failures) {
  std::mt19937_64 gen(4242);
  std::size_t mismatches = 0;
  for (int iter = 0; iter < 500; ++iter) {
    std::vector<std::pair<Label, Label>> pairs;
    const std::size_t n = 1 + gen() % 300;
    for (std::size_t i = 0; i < n; ++i) {
      pairs.emplace_back(static_cast<Label>(gen() % 3), static_cast<Label>(gen() % 4));
    }
    const MetricsReport report = metrics(confusion(pairs));
    const testutil::OracleMetrics oracle = testutil::brute_force_metrics(pairs);
    bool ok = report.accuracy == oracle.accuracy &&
              report.macro_precision == oracle.macro_precision &&
              report.macro_recall == oracle.macro_recall && report.macro_f1 == oracle.macro_f1;
    for (int k = 0; k < 3; ++k) {
      ok = ok && report.per_class[k].precision == oracle.precision[k] &&
           report.per_class[k].recall == oracle.recall[k] &&
           report.per_class[k].f1 == oracle.f1[k];
    }
    if (!ok) {
      ++mismatches;
    }
  }
  expect(failures, mismatches == 0,
         "oracle mismatches: " + std::to_string(mismatches) + " of 500");
}

// --------------------------------------------------------------------------
// 7. end-to-end toy pipeline with 4-bit quantization
// --------------------------------------------------------------------------
void criterion_toy_pipeline(std::vector<std::string> &failures) {
  const Corpus corpus = testutil::make_separable_corpus(300);
  const WeightTensor weights = toy_classifier_train(corpus, 256, 1);
  const EmissionFactor factor{"test-grid", 400.0, EmissionScope::Scope2};
  InferenceConfig config;
  config.model_name = "toy";
  RunOptions options;
  options.subset_seed = 0;

  auto fp32_runner = make_toy_runner(weights);
  auto c1 = make_constant_power_collector(28.0);
  const BenchmarkRun before = run_benchmark(*fp32_runner, corpus, config, *c1, factor, options);

  InferenceConfig q_config = config;
  q_config.model_name = "toy-int4";
  auto q_runner = make_toy_runner(weights, 4);
  auto c2 = make_constant_power_collector(28.0);
  const BenchmarkRun after = run_benchmark(*q_runner, corpus, q_config, *c2, factor, options);

  expect(failures, before.metrics.accuracy >= 0.98,
         "fp32 accuracy " + std::to_string(before.metrics.accuracy) + " < 0.98");
  expect(failures, before.metrics.accuracy - after.metrics.accuracy <= 0.02,
         "quantized accuracy drop " +
             std::to_string(before.metrics.accuracy - after.metrics.accuracy) + " > 0.02");
  expect(failures, after.quantization && after.quantization->footprint_ratio <= 0.15,
         "footprint ratio " +
             std::to_string(after.quantization ? after.quantization->footprint_ratio : -1.0) +
             " > 0.15");

  const ComparisonReport report = compare(before, after);
  for (const BenchmarkRun *run : {&before, &after}) {
    const double joules = 28.0 * static_cast<double>(run->energy.window_ms) / 1000.0;
    const double kg =
        static_cast<double>(static_cast<long double>(joules / 3.6e6) *
                            (static_cast<long double>(factor.gco2_per_kwh) / 1000.0L));
    expect(failures, run->carbon.kg_co2e == kg,
           "CO2 does not recompute exactly from duration x watts x alpha");
  }
  expect(failures,
         report.before_kg_co2e == before.carbon.kg_co2e &&
             report.after_kg_co2e == after.carbon.kg_co2e,
         "comparison does not carry the runs' CO2 values");
}

// --------------------------------------------------------------------------
// 8. deterministic bench: identical seed + trace replay => identical bytes
// --------------------------------------------------------------------------
void criterion_determinism(std::vector<std::string> &failures) {
  const std::string dataset = "/tmp/greenbench_acc_dataset.csv";
  save_corpus_csv(dataset, testutil::make_separable_corpus(120));

  const std::string factors = testutil::fixture_path("factors.csv");
  const std::string trace = testutil::fixture_path("trace_constant.csv");

  auto run_once = [&](const std::string &out) {
    const std::string cmd = std::string(GREENBENCH_CLI_PATH) + " bench --runner toy --dataset " +
                            dataset + " --subset 60 --seed 7 --power-source trace:" + trace +
                            " --factor-file " + factors + " --region test-grid --out " + out +
                            " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
  };
  auto slurp = [](const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
  };

  const std::string out_a = "/tmp/greenbench_acc_run_a.json";
  const std::string out_b = "/tmp/greenbench_acc_run_b.json";
  expect(failures, run_once(out_a) == 0, "first bench invocation failed");
  expect(failures, run_once(out_b) == 0, "second bench invocation failed");
  const std::string a = slurp(out_a);
  expect(failures, !a.empty() && a == slurp(out_b), "reports are not byte-identical");
}

// --------------------------------------------------------------------------
// 9. HTTP client conformance against a local stub
// --------------------------------------------------------------------------
void criterion_http_conformance(std::vector<std::string> &failures) {
  HttpRunnerOptions options;
  options.retries = 1;
  options.backoff_base_ms = 1;
  options.timeout_s = 5;

  InferenceConfig config;
  config.model_name = "stub";
  config.temperature = 0.7;
  config.top_p = 0.9;
  config.top_k = 50;
  config.max_tokens = 512;

  {
    httplib::Server server;
    nlohmann::json seen;
    server.Post("/api/generate", [&](const httplib::Request &req, httplib::Response &res) {
      seen = nlohmann::json::parse(req.body);
      res.set_content(
          R"({"response":"Neutral: factual.","eval_count":5,"eval_duration":1000000})",
          "application/json");
    });
    options.port = server.bind_to_any_port("127.0.0.1");
    std::thread listener([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    try {
      const GenerateResult r = http_generate(options, config, "the prompt");
      expect(failures, r.text == "Neutral: factual.", "response text not parsed");
      expect(failures, r.eval_count == 5, "eval_count not parsed");
      expect(failures, r.eval_duration_ns == 1000000, "eval_duration not parsed");
      expect(failures,
             seen["model"] == "stub" && seen["prompt"] == "the prompt" &&
                 seen["stream"] == false && seen["options"]["temperature"] == 0.7 &&
                 seen["options"]["top_p"] == 0.9 && seen["options"]["top_k"] == 50 &&
                 seen["options"]["num_predict"] == 512,
             "request body fields do not match the documented format");
    } catch (const Error &e) {
      expect(failures, false, std::string("positive fixture raised: ") + e.what());
    }
    server.stop();
    listener.join();
  }

  // negative fixture: unreachable endpoint
  {
    HttpRunnerOptions dead = options;
    dead.port = 1;
    bool raised = false;
    try {
      http_generate(dead, config, "p");
    } catch (const ConnectionFailed &) {
      raised = true;
    } catch (...) {
    }
    expect(failures, raised, "unreachable endpoint did not raise ConnectionFailed");
  }

  // negative fixtures: http status and malformed body
  {
    httplib::Server server;
    server.Post("/api/generate", [&](const httplib::Request &req, httplib::Response &res) {
      const auto body = nlohmann::json::parse(req.body);
      if (body["prompt"] == "status") {
        res.status = 503;
        res.set_content("overloaded", "text/plain");
      } else {
        res.set_content("not json", "text/plain");
      }
    });
    options.port = server.bind_to_any_port("127.0.0.1");
    std::thread listener([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    bool raised_http = false, raised_malformed = false;
    int status = 0;
    try {
      http_generate(options, config, "status");
    } catch (const HttpError &e) {
      raised_http = true;
      status = e.status;
    } catch (...) {
    }
    try {
      http_generate(options, config, "malformed");
    } catch (const MalformedResponse &) {
      raised_malformed = true;
    } catch (...) {
    }
    expect(failures, raised_http && status == 503, "503 did not raise HttpError(503)");
    expect(failures, raised_malformed, "non-JSON body did not raise MalformedResponse");
    server.stop();
    listener.join();
  }
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, CheckFn>> criteria = {
      {"1 quantization round-trip properties (10,000 random tensors)",
       criterion_quantize_properties},
      {"2 published CO2 columns reproduce per-model reductions", criterion_reduction_arithmetic},
      {"3 F1 spot check: P=1.00, R=0.84 -> 0.913 -> \"0.91\"", criterion_f1_spot_check},
      {"4 CF = E x alpha exactness and linearity", criterion_carbon_exactness},
      {"5 energy integration fixtures", criterion_energy_fixtures},
      {"6 metrics equal brute-force oracle on 500 pair sets", criterion_metrics_oracle},
      {"7 end-to-end toy pipeline with 4-bit quantization", criterion_toy_pipeline},
      {"8 byte-identical reports for identical seeded runs", criterion_determinism},
      {"9 HTTP client conformance against a local stub", criterion_http_conformance},
  };

  int failed = 0;
  for (const auto &[name, fn] : criteria) {
    std::vector<std::string> failures;
    try {
      fn(failures);
    } catch (const std::exception &e) {
      failures.push_back(std::string("exception: ") + e.what());
    }
    if (failures.empty()) {
      std::cout << "PASS criterion " << name << "\n";
    } else {
      ++failed;
      std::cout << "FAIL criterion " << name << "\n";
      for (const auto &f : failures) {
        std::cout << "     - " << f << "\n";
      }
    }
  }
  return failed == 0 ? 0 : 1;
}
