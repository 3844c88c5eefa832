#pragma once

/**
 * Benchmark orchestration: drive a model runner over a corpus while an
 * energy collector samples, then assemble metrics + carbon into run records
 * and before/after comparisons.
 */

#include "greenbench/carbon.hpp"
#include "greenbench/corpus.hpp"
#include "greenbench/energy.hpp"
#include "greenbench/metrics.hpp"
#include "greenbench/quantize.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace greenbench {

struct InferenceConfig {
  std::string model_name = "toy";
  int batch_size = 8;
  int max_tokens = 512;
  double temperature = 0.7;
  double top_p = 0.9;
  int top_k = 50;
  int beam_size = 4;

  void validate() const; // throws Error on out-of-range fields
};

// Flat key=value preset file mirroring InferenceConfig fields.
InferenceConfig load_config_file(const std::string &path);

struct GenerateResult {
  std::string text;
  std::optional<std::int64_t> eval_count;       // tokens, when reported
  std::optional<std::int64_t> eval_duration_ns; // when reported
};

struct QuantizationInfo {
  int bits = 4;
  double footprint_ratio = 0.0;
};

class ModelRunner {
public:
  virtual ~ModelRunner() = default;
  // The raw example is available so desk-scale runners can classify the text
  // directly; HTTP runners send the rendered prompt.
  virtual GenerateResult generate(const Example &example, const std::string &prompt,
                                  const InferenceConfig &config) = 0;
  virtual std::string name() const = 0;
  virtual std::optional<QuantizationInfo> quantization() const { return {}; }
};

// Always answers with a fixed response, or echoes the gold label when no
// fixed response is configured.
std::unique_ptr<ModelRunner> make_mock_runner(std::optional<std::string> fixed_response = {});

// ---------------------------------------------------------------------------
// Toy classifier: hashed bag-of-words linear model, averaged perceptron.
// A desk-scale classifier that exercises the full quantize -> infer path.
// ---------------------------------------------------------------------------

WeightTensor toy_classifier_train(const Corpus &corpus, std::size_t dims, std::uint64_t seed);

Label toy_classifier_predict(const WeightTensor &weights, const std::string &text);
Label toy_classifier_predict(const QuantizedTensor &weights, const std::string &text);

// fp32 weights, or quantized to `quantize_bits` before serving.
std::unique_ptr<ModelRunner> make_toy_runner(WeightTensor weights,
                                             std::optional<int> quantize_bits = {});

// ---------------------------------------------------------------------------
// HTTP generate client (local-inference /api/generate endpoint)
// ---------------------------------------------------------------------------

struct HttpRunnerOptions {
  std::string host = "127.0.0.1";
  int port = 11434;
  std::string path = "/api/generate";
  std::string model_label; // report name; defaults to config.model_name
  int retries = 3;
  int backoff_base_ms = 250; // doubled per attempt
  int timeout_s = 120;
};

GenerateResult http_generate(const HttpRunnerOptions &options, const InferenceConfig &config,
                             const std::string &prompt);

HttpRunnerOptions parse_endpoint(const std::string &url); // http://host:port[/path]

std::unique_ptr<ModelRunner> make_http_runner(HttpRunnerOptions options);

// ---------------------------------------------------------------------------
// Benchmark runs and comparisons
// ---------------------------------------------------------------------------

struct CorpusDescriptor {
  std::string id;         // source path
  std::size_t size = 0;   // subset size
  std::uint64_t seed = 0; // subset seed

  bool operator==(const CorpusDescriptor &) const = default;
};

struct PredictionRecord {
  std::string text;
  Label gold = Label::Neutral;
  Label predicted = Label::Unknown;
  std::string raw_response;
};

struct BenchmarkRun {
  InferenceConfig config;
  CorpusDescriptor corpus;
  MetricsReport metrics;
  EnergyReading energy;
  CarbonFootprint carbon;
  double latency_ms_per_inference = 0.0;
  std::optional<QuantizationInfo> quantization;
  std::int64_t wall_clock_start_ms = 0;
  std::int64_t wall_clock_end_ms = 0;
  bool beam_size_honored = false; // generate APIs ignore beam size
  std::vector<PredictionRecord> predictions;
};

struct RunOptions {
  bool parallel = false;       // when true, up to batch_size in-flight requests
  std::uint64_t subset_seed = 0; // recorded in the corpus descriptor
};

BenchmarkRun run_benchmark(ModelRunner &model, const Corpus &corpus,
                           const InferenceConfig &config, EnergyCollector &energy,
                           const EmissionFactor &factor, const RunOptions &options = {});

struct MetricDeltas {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
};

struct ComparisonReport {
  std::string before_model;
  std::string after_model;
  double before_kg_co2e = 0.0;
  double after_kg_co2e = 0.0;
  double co2_reduction_pct = 0.0; // negative when the "after" run regressed
  MetricDeltas deltas;            // after minus before
};

ComparisonReport compare(const BenchmarkRun &before, const BenchmarkRun &after);

// Audit-trail CSV: header `text,gold,predicted,raw_response`.
void save_predictions_csv(const std::string &path,
                          const std::vector<PredictionRecord> &predictions);

} // namespace greenbench
