// greenbench: quantize tensors, run sentiment benchmarks with energy and
// carbon accounting, and emit before/after comparison reports.

#include "greenbench/errors.hpp"
#include "greenbench/report.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

namespace {

using namespace greenbench;

struct PowerSource {
  std::unique_ptr<EnergyCollector> collector;
  std::string description;
};

PowerSource make_power_source(const std::string &power_spec,
                              std::optional<std::uint64_t> counter_max_range_uj) {
  const auto colon = power_spec.find(':');
  if (colon == std::string::npos) {
    throw Error("power source must be constant:<watts>, trace:<path>, or counter:<path>");
  }
  const std::string kind = power_spec.substr(0, colon);
  const std::string arg = power_spec.substr(colon + 1);

  PowerSource source;
  if (kind == "constant") {
    const double watts = std::stod(arg);
    source.collector = make_constant_power_collector(watts);
  } else if (kind == "trace") {
    source.collector = make_trace_replay_collector(load_power_trace(arg));
  } else if (kind == "counter") {
    std::string path = arg;
    std::uint64_t max_range = 0;
    const auto second = arg.rfind(':');
    if (second != std::string::npos) {
      path = arg.substr(0, second);
      max_range = std::stoull(arg.substr(second + 1));
    } else if (counter_max_range_uj) {
      max_range = *counter_max_range_uj;
    } else {
      throw Error("counter power source needs counter:<path>:<max_range_uj> or "
                  "--counter-max-range-uj");
    }
    source.collector = make_counter_file_collector(path, max_range);
  } else {
    throw Error("unknown power source kind: " + kind);
  }
  source.description = source.collector->description();
  return source;
}

int run_quantize(const std::string &input, int bits, const std::string &out) {
  const WeightTensor w = load_tensor(input);
  const QuantizedTensor q = quantize(w, bits);
  const QuantErrorStats stats = quant_error(w, bits);
  save_quantized(out, q);

  const double ratio = static_cast<double>(memory_footprint(q)) /
                       static_cast<double>(memory_footprint(w));
  std::cout << "elements: " << w.element_count() << "\n"
            << "bits: " << bits << "\n"
            << "delta: " << q.delta << "\n"
            << "minimum: " << q.minimum << "\n"
            << "max_abs_error: " << stats.max_abs_error << "\n"
            << "mean_squared_error: " << stats.mean_squared_error << "\n"
            << "footprint_bytes: " << memory_footprint(q) << " (ratio "
            << format_rounded(ratio, 3) << ")\n";
  return 0;
}

struct BenchArgs {
  std::string dataset;
  std::string runner = "mock";
  std::string endpoint = "http://127.0.0.1:11434";
  std::string config_file;
  std::string model_name;
  std::string power_source = "constant:28";
  std::string factor_file;
  std::string region;
  std::size_t subset = 0; // 0 = full corpus
  std::uint64_t seed = 0;
  std::string out;
  std::string predictions_out;
  std::optional<int> quantize_bits;
  std::optional<std::uint64_t> counter_max_range_uj;
  std::size_t toy_dims = 256;
  bool parallel = false;
};

int run_bench(const BenchArgs &args) {
  if (args.factor_file.empty()) {
    throw Error("no emission factor file; pass --factor-file or set GREENBENCH_FACTOR_FILE");
  }
  const FactorTable factors = load_factor_table(args.factor_file);
  const EmissionFactor &factor = factors.lookup(args.region);

  const Corpus full = load_corpus_csv(args.dataset);
  const std::size_t n = args.subset == 0 ? full.size() : args.subset;
  const Corpus subset = split(full, n, args.seed);

  InferenceConfig config;
  if (!args.config_file.empty()) {
    config = load_config_file(args.config_file);
  }
  if (!args.model_name.empty()) {
    config.model_name = args.model_name;
  }

  std::unique_ptr<ModelRunner> model;
  if (args.runner == "mock") {
    if (config.model_name == "toy") {
      config.model_name = "mock";
    }
    model = make_mock_runner();
  } else if (args.runner == "toy") {
    const WeightTensor weights = toy_classifier_train(full, args.toy_dims, args.seed);
    model = make_toy_runner(weights, args.quantize_bits);
    if (args.model_name.empty() && args.config_file.empty()) {
      config.model_name = model->name();
    }
  } else if (args.runner == "http") {
    HttpRunnerOptions options = parse_endpoint(args.endpoint);
    options.model_label = config.model_name;
    model = make_http_runner(options);
  } else {
    throw Error("unknown runner: " + args.runner);
  }
  config.validate();

  PowerSource power = make_power_source(args.power_source, args.counter_max_range_uj);

  RunOptions run_options;
  run_options.parallel = args.parallel;
  run_options.subset_seed = args.seed;
  BenchmarkRun run =
      run_benchmark(*model, subset, config, *power.collector, factor, run_options);

  if (!args.predictions_out.empty()) {
    save_predictions_csv(args.predictions_out, run.predictions);
  }

  ReportDocument doc;
  doc.runs.push_back(std::move(run));
  doc.provenance.energy_provider = power.description;
  doc.provenance.factor_file = args.factor_file;
  doc.provenance.factor_region = factor.region;
  doc.provenance.corpus_path = args.dataset;
  doc.provenance.subset_size = n;
  doc.provenance.subset_seed = args.seed;

  if (args.out.empty()) {
    std::cout << emit_json(doc);
  } else {
    save_report(args.out, doc);
    std::cerr << "wrote " << args.out << "\n";
  }
  return 0;
}

int run_compare(const std::string &before_path, const std::string &after_path,
                const std::string &out) {
  const ReportDocument before_doc = load_report(before_path);
  const ReportDocument after_doc = load_report(after_path);
  if (before_doc.runs.empty() || after_doc.runs.empty()) {
    throw Error("both inputs must contain at least one run");
  }

  ReportDocument doc;
  doc.runs.push_back(before_doc.runs.front());
  doc.runs.push_back(after_doc.runs.front());
  doc.comparisons.push_back(compare(doc.runs[0], doc.runs[1]));
  doc.provenance = before_doc.provenance;

  if (out.empty()) {
    std::cout << emit_json(doc);
  } else {
    save_report(out, doc);
    std::cerr << "wrote " << out << "\n";
  }
  std::cerr << "co2 reduction: " << format_rounded(doc.comparisons[0].co2_reduction_pct, 1)
            << "%\n";
  return 0;
}

int run_report(const std::string &doc_path, const std::string &out) {
  const ReportDocument doc = load_report(doc_path);
  const std::string markdown = emit_markdown_table(doc);
  if (out.empty()) {
    std::cout << markdown;
  } else {
    std::ofstream file(out, std::ios::binary);
    if (!file) {
      throw IoError("cannot write " + out);
    }
    file << markdown;
  }
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"greenbench: quantization, energy, and carbon benchmarking for "
               "sentiment classification"};
  app.require_subcommand(1);

  // quantize
  auto *quantize_cmd = app.add_subcommand("quantize", "Quantize a tensor fixture file");
  std::string q_input, q_out = "quantized.txt";
  int q_bits = 4;
  quantize_cmd->add_option("--input", q_input, "Tensor file (shape line + value line)")
      ->required();
  quantize_cmd->add_option("--bits", q_bits, "Bit width in [2, 8]")->default_val(4);
  quantize_cmd->add_option("--out", q_out, "Output quantized tensor file");

  // bench
  auto *bench_cmd = app.add_subcommand("bench", "Run a benchmark over a dataset");
  BenchArgs bench;
  if (const char *env = std::getenv("GREENBENCH_FACTOR_FILE")) {
    bench.factor_file = env;
  }
  bench_cmd->add_option("--dataset", bench.dataset, "Dataset CSV (text,label)")->required();
  bench_cmd->add_option("--runner", bench.runner, "mock | toy | http")
      ->check(CLI::IsMember({"mock", "toy", "http"}));
  bench_cmd->add_option("--endpoint", bench.endpoint, "Generate endpoint URL (http runner)");
  bench_cmd->add_option("--config", bench.config_file, "Preset config file (key=value)");
  bench_cmd->add_option("--model", bench.model_name, "Model name (overrides config file)");
  bench_cmd->add_option("--power-source", bench.power_source,
                        "constant:<watts> | trace:<path> | counter:<path>[:<max_range_uj>]");
  bench_cmd->add_option("--factor-file", bench.factor_file,
                        "Emission factor CSV (default: $GREENBENCH_FACTOR_FILE)");
  bench_cmd->add_option("--region", bench.region, "Emission factor region key")->required();
  bench_cmd->add_option("--subset", bench.subset, "Subset size (0 = full corpus)");
  bench_cmd->add_option("--seed", bench.seed, "Subset / training seed");
  bench_cmd->add_option("--out", bench.out, "Report JSON output path (default: stdout)");
  bench_cmd->add_option("--predictions-out", bench.predictions_out,
                        "Audit-trail predictions CSV path");
  int bench_bits = 0;
  bench_cmd->add_option("--quantize-bits", bench_bits,
                        "Quantize toy classifier weights to this bit width");
  std::uint64_t counter_range = 0;
  bench_cmd->add_option("--counter-max-range-uj", counter_range,
                        "Counter wraparound range in microjoules");
  bench_cmd->add_option("--toy-dims", bench.toy_dims, "Hash buckets for the toy classifier");
  bench_cmd->add_flag("--parallel", bench.parallel,
                      "Dispatch up to batch_size concurrent inferences");

  // compare
  auto *compare_cmd = app.add_subcommand("compare", "Compare two benchmark run files");
  std::string cmp_before, cmp_after, cmp_out;
  compare_cmd->add_option("before", cmp_before, "Run JSON before optimization")->required();
  compare_cmd->add_option("after", cmp_after, "Run JSON after optimization")->required();
  compare_cmd->add_option("--out", cmp_out, "Comparison JSON output path (default: stdout)");

  // report
  auto *report_cmd = app.add_subcommand("report", "Render a report document as markdown");
  std::string rep_doc, rep_out;
  report_cmd->add_option("document", rep_doc, "Report JSON document")->required();
  report_cmd->add_option("--out", rep_out, "Markdown output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 1;
  }

  try {
    if (quantize_cmd->parsed()) {
      return run_quantize(q_input, q_bits, q_out);
    }
    if (bench_cmd->parsed()) {
      if (bench_bits != 0) {
        bench.quantize_bits = bench_bits;
      }
      if (counter_range != 0) {
        bench.counter_max_range_uj = counter_range;
      }
      return run_bench(bench);
    }
    if (compare_cmd->parsed()) {
      return run_compare(cmp_before, cmp_after, cmp_out);
    }
    if (report_cmd->parsed()) {
      return run_report(rep_doc, rep_out);
    }
  } catch (const greenbench::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
