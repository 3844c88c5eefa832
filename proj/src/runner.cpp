#include "greenbench/runner.hpp"

#include "greenbench/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace greenbench {

namespace {

std::int64_t system_now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string trim(const std::string &s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) {
    return "";
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

} // namespace

void InferenceConfig::validate() const {
  if (model_name.empty()) {
    throw Error("model_name must be non-empty");
  }
  if (batch_size < 1) {
    throw Error("batch_size must be >= 1");
  }
  if (max_tokens < 1) {
    throw Error("max_tokens must be >= 1");
  }
  if (temperature < 0.0) {
    throw Error("temperature must be >= 0");
  }
  if (!(top_p > 0.0 && top_p <= 1.0)) {
    throw Error("top_p must be in (0, 1]");
  }
  if (top_k < 1) {
    throw Error("top_k must be >= 1");
  }
  if (beam_size < 1) {
    throw Error("beam_size must be >= 1");
  }
}

InferenceConfig load_config_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config file: " + path);
  }
  InferenceConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw IoError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "model_name") {
        config.model_name = value;
      } else if (key == "batch_size") {
        config.batch_size = std::stoi(value);
      } else if (key == "max_tokens") {
        config.max_tokens = std::stoi(value);
      } else if (key == "temperature") {
        config.temperature = std::stod(value);
      } else if (key == "top_p") {
        config.top_p = std::stod(value);
      } else if (key == "top_k") {
        config.top_k = std::stoi(value);
      } else if (key == "beam_size") {
        config.beam_size = std::stoi(value);
      } else {
        throw IoError(path + ":" + std::to_string(line_no) + ": unknown key `" + key + "`");
      }
    } catch (const std::invalid_argument &) {
      throw IoError(path + ":" + std::to_string(line_no) + ": bad value for `" + key + "`");
    }
  }
  config.validate();
  return config;
}

// ---------------------------------------------------------------------------
// Mock runner
// ---------------------------------------------------------------------------

namespace {

class MockRunner final : public ModelRunner {
public:
  explicit MockRunner(std::optional<std::string> fixed) : fixed_(std::move(fixed)) {}

  GenerateResult generate(const Example &example, const std::string &,
                          const InferenceConfig &) override {
    GenerateResult r;
    r.text = fixed_ ? *fixed_ : to_string(example.label);
    return r;
  }

  std::string name() const override { return "mock"; }

private:
  std::optional<std::string> fixed_;
};

} // namespace

std::unique_ptr<ModelRunner> make_mock_runner(std::optional<std::string> fixed_response) {
  return std::make_unique<MockRunner>(std::move(fixed_response));
}

// ---------------------------------------------------------------------------
// Toy classifier
// ---------------------------------------------------------------------------

namespace {

std::uint64_t fnv1a(const std::string &token) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : token) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// token buckets with multiplicity
std::vector<std::size_t> hash_features(const std::string &text, std::size_t dims) {
  std::vector<std::size_t> buckets;
  std::string token;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      token += static_cast<char>(std::tolower(c));
    } else if (!token.empty()) {
      buckets.push_back(static_cast<std::size_t>(fnv1a(token) % dims));
      token.clear();
    }
  }
  if (!token.empty()) {
    buckets.push_back(static_cast<std::size_t>(fnv1a(token) % dims));
  }
  return buckets;
}

std::size_t argmax_class(const double scores[kNumClasses]) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < kNumClasses; ++k) {
    if (scores[k] > scores[best]) {
      best = k; // ties keep the earlier class: positive, negative, neutral
    }
  }
  return best;
}

template <typename WeightAt>
Label predict_with(const WeightAt &weight_at, std::size_t dims, const std::string &text) {
  double scores[kNumClasses] = {0.0, 0.0, 0.0};
  for (std::size_t bucket : hash_features(text, dims)) {
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      scores[k] += weight_at(k * dims + bucket);
    }
  }
  return static_cast<Label>(argmax_class(scores));
}

} // namespace

WeightTensor toy_classifier_train(const Corpus &corpus, std::size_t dims, std::uint64_t seed) {
  if (corpus.examples.empty()) {
    throw EmptyEvaluation("cannot train on an empty corpus");
  }
  constexpr int kEpochs = 5;
  const std::size_t n = corpus.examples.size();

  std::vector<std::vector<std::size_t>> features(n);
  for (std::size_t i = 0; i < n; ++i) {
    features[i] = hash_features(corpus.examples[i].text, dims);
  }

  std::vector<double> w(kNumClasses * dims, 0.0);
  std::vector<double> acc(kNumClasses * dims, 0.0); // t-weighted update sum
  double t = 1.0;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 gen(seed);

  for (int epoch = 0; epoch < kEpochs; ++epoch) {
    // hand-rolled Fisher-Yates; keeps training order platform-independent
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(gen() % (n - i));
      std::swap(order[i], order[j]);
    }
    for (std::size_t idx : order) {
      const auto &buckets = features[idx];
      double scores[kNumClasses] = {0.0, 0.0, 0.0};
      for (std::size_t b : buckets) {
        for (std::size_t k = 0; k < kNumClasses; ++k) {
          scores[k] += w[k * dims + b];
        }
      }
      const std::size_t pred = argmax_class(scores);
      const std::size_t gold = static_cast<std::size_t>(corpus.examples[idx].label);
      if (pred != gold) {
        for (std::size_t b : buckets) {
          w[gold * dims + b] += 1.0;
          w[pred * dims + b] -= 1.0;
          acc[gold * dims + b] += t;
          acc[pred * dims + b] -= t;
        }
      }
      t += 1.0;
    }
  }

  WeightTensor weights;
  weights.shape = {kNumClasses, dims};
  weights.values.resize(kNumClasses * dims);
  for (std::size_t i = 0; i < w.size(); ++i) {
    weights.values[i] = static_cast<float>(w[i] - acc[i] / t); // averaged weights
  }
  return weights;
}

Label toy_classifier_predict(const WeightTensor &weights, const std::string &text) {
  if (weights.shape.size() != 2 || weights.shape[0] != kNumClasses) {
    throw ShapeMismatch("toy classifier weights must be shaped (3, dims)");
  }
  const std::size_t dims = weights.shape[1];
  return predict_with([&](std::size_t i) { return static_cast<double>(weights.values[i]); },
                      dims, text);
}

Label toy_classifier_predict(const QuantizedTensor &weights, const std::string &text) {
  return toy_classifier_predict(dequantize(weights), text);
}

namespace {

class ToyRunner final : public ModelRunner {
public:
  ToyRunner(WeightTensor weights, std::optional<int> bits) : fp32_(std::move(weights)) {
    if (bits) {
      QuantizedTensor q = quantize(fp32_, *bits);
      info_ = QuantizationInfo{
          *bits, static_cast<double>(memory_footprint(q)) /
                     static_cast<double>(memory_footprint(fp32_))};
      serving_ = dequantize(q);
    } else {
      serving_ = fp32_;
    }
  }

  GenerateResult generate(const Example &example, const std::string &,
                          const InferenceConfig &) override {
    GenerateResult r;
    const Label pred = toy_classifier_predict(serving_, example.text);
    r.text = to_string(pred) + ": hashed bag-of-words score";
    return r;
  }

  std::string name() const override { return info_ ? "toy-quantized" : "toy"; }
  std::optional<QuantizationInfo> quantization() const override { return info_; }

private:
  WeightTensor fp32_;
  WeightTensor serving_;
  std::optional<QuantizationInfo> info_;
};

} // namespace

std::unique_ptr<ModelRunner> make_toy_runner(WeightTensor weights,
                                             std::optional<int> quantize_bits) {
  return std::make_unique<ToyRunner>(std::move(weights), quantize_bits);
}

// ---------------------------------------------------------------------------
// HTTP generate client
// ---------------------------------------------------------------------------

HttpRunnerOptions parse_endpoint(const std::string &url) {
  HttpRunnerOptions opts;
  std::string rest = url;
  const std::string scheme = "http://";
  if (rest.rfind(scheme, 0) == 0) {
    rest = rest.substr(scheme.size());
  } else if (rest.rfind("https://", 0) == 0) {
    throw Error("https endpoints are not supported: " + url);
  }
  const auto slash = rest.find('/');
  std::string hostport = rest.substr(0, slash);
  if (slash != std::string::npos && slash + 1 < rest.size()) {
    opts.path = rest.substr(slash);
  }
  const auto colon = hostport.find(':');
  if (colon != std::string::npos) {
    opts.host = hostport.substr(0, colon);
    try {
      opts.port = std::stoi(hostport.substr(colon + 1));
    } catch (const std::exception &) {
      throw Error("bad port in endpoint: " + url);
    }
  } else if (!hostport.empty()) {
    opts.host = hostport;
  }
  if (opts.host.empty()) {
    throw Error("bad endpoint: " + url);
  }
  return opts;
}

GenerateResult http_generate(const HttpRunnerOptions &options, const InferenceConfig &config,
                             const std::string &prompt) {
  nlohmann::json body = {
      {"model", config.model_name},
      {"prompt", prompt},
      {"stream", false},
      {"options",
       {{"temperature", config.temperature},
        {"top_p", config.top_p},
        {"top_k", config.top_k},
        {"num_predict", config.max_tokens}}},
  };
  const std::string payload = body.dump();

  std::exception_ptr last_error;
  for (int attempt = 0; attempt <= options.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(options.backoff_base_ms * (1 << (attempt - 1))));
    }
    httplib::Client client(options.host, options.port);
    client.set_connection_timeout(options.timeout_s);
    client.set_read_timeout(options.timeout_s);
    auto res = client.Post(options.path, payload, "application/json");
    if (!res) {
      last_error = std::make_exception_ptr(ConnectionFailed(
          "cannot reach " + options.host + ":" + std::to_string(options.port)));
      continue;
    }
    if (res->status != 200) {
      last_error = std::make_exception_ptr(
          HttpError("generate endpoint returned status " + std::to_string(res->status),
                    res->status));
      continue;
    }
    nlohmann::json doc = nlohmann::json::parse(res->body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("response") ||
        !doc["response"].is_string()) {
      last_error = std::make_exception_ptr(
          MalformedResponse("generate response body is not the documented JSON"));
      continue;
    }
    GenerateResult r;
    r.text = doc["response"].get<std::string>();
    if (doc.contains("eval_count") && doc["eval_count"].is_number_integer()) {
      r.eval_count = doc["eval_count"].get<std::int64_t>();
    }
    if (doc.contains("eval_duration") && doc["eval_duration"].is_number_integer()) {
      r.eval_duration_ns = doc["eval_duration"].get<std::int64_t>();
    }
    return r;
  }
  std::rethrow_exception(last_error);
}

namespace {

class HttpRunner final : public ModelRunner {
public:
  explicit HttpRunner(HttpRunnerOptions options) : options_(std::move(options)) {}

  GenerateResult generate(const Example &, const std::string &prompt,
                          const InferenceConfig &config) override {
    return http_generate(options_, config, prompt);
  }

  std::string name() const override {
    return options_.model_label.empty() ? "http" : options_.model_label;
  }

private:
  HttpRunnerOptions options_;
};

} // namespace

std::unique_ptr<ModelRunner> make_http_runner(HttpRunnerOptions options) {
  return std::make_unique<HttpRunner>(std::move(options));
}

// ---------------------------------------------------------------------------
// Benchmark runs
// ---------------------------------------------------------------------------

namespace {

struct SlotResult {
  Label predicted = Label::Unknown;
  std::string raw_response;
};

// Runs one example; generation failures degrade to an unknown prediction so
// the energy window still covers the whole corpus. ConnectionFailed is the
// abort signal handled by the caller.
SlotResult run_one(ModelRunner &model, const Example &example, const InferenceConfig &config) {
  SlotResult slot;
  const std::string prompt = build_prompt(example.text);
  try {
    const GenerateResult r = model.generate(example, prompt, config);
    slot.predicted = parse_label(r.text);
    slot.raw_response = r.text;
  } catch (const ConnectionFailed &) {
    throw;
  } catch (const Error &e) {
    slot.predicted = Label::Unknown;
    slot.raw_response = std::string("generation failed: ") + e.what();
  }
  return slot;
}

} // namespace

BenchmarkRun run_benchmark(ModelRunner &model, const Corpus &corpus,
                           const InferenceConfig &config, EnergyCollector &energy,
                           const EmissionFactor &factor, const RunOptions &options) {
  config.validate();
  const std::size_t n = corpus.examples.size();
  if (n == 0) {
    throw EmptyEvaluation("benchmark corpus is empty");
  }

  std::vector<SlotResult> slots(n);
  std::atomic<std::size_t> completed{0};

  energy.start();
  const auto steady_start = std::chrono::steady_clock::now();
  const std::int64_t wall_start = system_now_ms();

  std::exception_ptr abort_error;
  const std::size_t workers =
      options.parallel ? std::min<std::size_t>(static_cast<std::size_t>(config.batch_size), n)
                       : 1;
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        slots[i] = run_one(model, corpus.examples[i], config);
        completed.fetch_add(1);
      } catch (const ConnectionFailed &) {
        abort_error = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> aborted{false};
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t wkr = 0; wkr < workers; ++wkr) {
      pool.emplace_back([&] {
        while (!aborted.load()) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n) {
            break;
          }
          try {
            slots[i] = run_one(model, corpus.examples[i], config);
            completed.fetch_add(1);
          } catch (const ConnectionFailed &) {
            std::lock_guard lock(error_mutex);
            if (!abort_error) {
              abort_error = std::current_exception();
            }
            aborted.store(true);
          }
        }
      });
    }
    for (auto &t : pool) {
      t.join();
    }
  }

  const EnergyReading reading = energy.stop();
  const auto steady_end = std::chrono::steady_clock::now();
  const std::int64_t wall_end = system_now_ms();

  if (abort_error) {
    try {
      std::rethrow_exception(abort_error);
    } catch (const ConnectionFailed &e) {
      throw ModelUnreachable(std::string(e.what()) + " (completed " +
                                 std::to_string(completed.load()) + "/" + std::to_string(n) +
                                 " inferences)",
                             completed.load());
    }
  }

  std::vector<std::pair<Label, Label>> pairs;
  pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    pairs.emplace_back(corpus.examples[i].label, slots[i].predicted);
  }

  BenchmarkRun run;
  run.config = config;
  run.corpus = CorpusDescriptor{corpus.source_path, n, options.subset_seed};
  run.metrics = metrics(confusion(pairs));
  run.energy = reading;
  run.carbon = footprint(reading, factor);
  run.carbon.per_inference_kg = per_inference(run.carbon, n);
  run.quantization = model.quantization();
  run.beam_size_honored = false;

  if (energy.deterministic_timeline()) {
    run.wall_clock_start_ms = energy.replay_start_ms();
    run.wall_clock_end_ms = energy.replay_end_ms();
    run.latency_ms_per_inference =
        static_cast<double>(run.wall_clock_end_ms - run.wall_clock_start_ms) /
        static_cast<double>(n);
  } else {
    run.wall_clock_start_ms = wall_start;
    run.wall_clock_end_ms = wall_end;
    run.latency_ms_per_inference =
        std::chrono::duration<double, std::milli>(steady_end - steady_start).count() /
        static_cast<double>(n);
  }

  run.predictions.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    run.predictions.push_back(PredictionRecord{corpus.examples[i].text,
                                               corpus.examples[i].label, slots[i].predicted,
                                               slots[i].raw_response});
  }
  return run;
}

ComparisonReport compare(const BenchmarkRun &before, const BenchmarkRun &after) {
  if (!(before.corpus == after.corpus)) {
    throw CorpusMismatch("runs cover different corpus subsets: " + before.corpus.id + " (n=" +
                         std::to_string(before.corpus.size) + ", seed=" +
                         std::to_string(before.corpus.seed) + ") vs " + after.corpus.id +
                         " (n=" + std::to_string(after.corpus.size) + ", seed=" +
                         std::to_string(after.corpus.seed) + ")");
  }
  ComparisonReport report;
  report.before_model = before.config.model_name;
  report.after_model = after.config.model_name;
  report.before_kg_co2e = before.carbon.kg_co2e;
  report.after_kg_co2e = after.carbon.kg_co2e;
  if (before.carbon.kg_co2e > 0.0) {
    report.co2_reduction_pct =
        100.0 * (before.carbon.kg_co2e - after.carbon.kg_co2e) / before.carbon.kg_co2e;
  }
  report.deltas.precision = after.metrics.macro_precision - before.metrics.macro_precision;
  report.deltas.recall = after.metrics.macro_recall - before.metrics.macro_recall;
  report.deltas.f1 = after.metrics.macro_f1 - before.metrics.macro_f1;
  report.deltas.accuracy = after.metrics.accuracy - before.metrics.accuracy;
  return report;
}

void save_predictions_csv(const std::string &path,
                          const std::vector<PredictionRecord> &predictions) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write predictions file: " + path);
  }
  auto escape = [](const std::string &field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) {
      return field;
    }
    std::string quoted = "\"";
    for (char c : field) {
      quoted += (c == '"') ? std::string("\"\"") : std::string(1, c);
    }
    quoted += "\"";
    return quoted;
  };
  out << "text,gold,predicted,raw_response\n";
  for (const auto &p : predictions) {
    out << escape(p.text) << "," << to_string(p.gold) << "," << to_string(p.predicted) << ","
        << escape(p.raw_response) << "\n";
  }
}

} // namespace greenbench
