#include "greenbench/report.hpp"

#include "greenbench/errors.hpp"

#include <cfenv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace greenbench {

using ordered_json = nlohmann::ordered_json;

namespace {

const char *kClassKeys[kNumClasses] = {"positive", "negative", "neutral"};

ordered_json run_to_json(const BenchmarkRun &run) {
  ordered_json j;
  j["model"] = run.config.model_name;
  j["config"] = {{"model_name", run.config.model_name},
                 {"batch_size", run.config.batch_size},
                 {"max_tokens", run.config.max_tokens},
                 {"temperature", run.config.temperature},
                 {"top_p", run.config.top_p},
                 {"top_k", run.config.top_k},
                 {"beam_size", run.config.beam_size},
                 {"beam_size_honored", run.beam_size_honored}};
  j["corpus"] = {{"id", run.corpus.id}, {"size", run.corpus.size}, {"seed", run.corpus.seed}};

  ordered_json per_class;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    per_class[kClassKeys[k]] = {{"precision", run.metrics.per_class[k].precision},
                                {"recall", run.metrics.per_class[k].recall},
                                {"f1", run.metrics.per_class[k].f1}};
  }
  j["metrics"] = {{"per_class", per_class},
                  {"macro_precision", run.metrics.macro_precision},
                  {"macro_recall", run.metrics.macro_recall},
                  {"macro_f1", run.metrics.macro_f1},
                  {"accuracy", run.metrics.accuracy},
                  {"unknown_predictions", run.metrics.unknown_predictions}};
  j["energy"] = {{"joules", run.energy.joules},
                 {"kwh", run.energy.kwh},
                 {"provider", to_string(run.energy.provider)},
                 {"window_ms", run.energy.window_ms}};
  j["carbon"] = {{"kg_co2e", run.carbon.kg_co2e},
                 {"energy_kwh", run.carbon.energy_kwh},
                 {"factor",
                  {{"region", run.carbon.factor.region},
                   {"gco2_per_kwh", run.carbon.factor.gco2_per_kwh},
                   {"scope", to_string(run.carbon.factor.scope)}}}};
  if (run.carbon.per_inference_kg) {
    j["carbon"]["per_inference_kg"] = *run.carbon.per_inference_kg;
  } else {
    j["carbon"]["per_inference_kg"] = nullptr;
  }
  j["latency_ms_per_inference"] = run.latency_ms_per_inference;
  if (run.quantization) {
    j["quantization"] = {{"bits", run.quantization->bits},
                         {"footprint_ratio", run.quantization->footprint_ratio}};
  } else {
    j["quantization"] = nullptr;
  }
  j["wall_clock"] = {{"start_ms", run.wall_clock_start_ms}, {"end_ms", run.wall_clock_end_ms}};
  return j;
}

BenchmarkRun run_from_json(const ordered_json &j) {
  BenchmarkRun run;
  const auto &config = j.at("config");
  run.config.model_name = config.at("model_name").get<std::string>();
  run.config.batch_size = config.at("batch_size").get<int>();
  run.config.max_tokens = config.at("max_tokens").get<int>();
  run.config.temperature = config.at("temperature").get<double>();
  run.config.top_p = config.at("top_p").get<double>();
  run.config.top_k = config.at("top_k").get<int>();
  run.config.beam_size = config.at("beam_size").get<int>();
  run.beam_size_honored = config.at("beam_size_honored").get<bool>();

  const auto &corpus = j.at("corpus");
  run.corpus.id = corpus.at("id").get<std::string>();
  run.corpus.size = corpus.at("size").get<std::size_t>();
  run.corpus.seed = corpus.at("seed").get<std::uint64_t>();

  const auto &metrics = j.at("metrics");
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const auto &cls = metrics.at("per_class").at(kClassKeys[k]);
    run.metrics.per_class[k].precision = cls.at("precision").get<double>();
    run.metrics.per_class[k].recall = cls.at("recall").get<double>();
    run.metrics.per_class[k].f1 = cls.at("f1").get<double>();
  }
  run.metrics.macro_precision = metrics.at("macro_precision").get<double>();
  run.metrics.macro_recall = metrics.at("macro_recall").get<double>();
  run.metrics.macro_f1 = metrics.at("macro_f1").get<double>();
  run.metrics.accuracy = metrics.at("accuracy").get<double>();
  run.metrics.unknown_predictions = metrics.at("unknown_predictions").get<std::uint64_t>();

  const auto &energy = j.at("energy");
  run.energy.joules = energy.at("joules").get<double>();
  run.energy.kwh = energy.at("kwh").get<double>();
  run.energy.provider = provider_kind_from_string(energy.at("provider").get<std::string>());
  run.energy.window_ms = energy.at("window_ms").get<std::int64_t>();

  const auto &carbon = j.at("carbon");
  run.carbon.kg_co2e = carbon.at("kg_co2e").get<double>();
  run.carbon.energy_kwh = carbon.at("energy_kwh").get<double>();
  run.carbon.factor.region = carbon.at("factor").at("region").get<std::string>();
  run.carbon.factor.gco2_per_kwh = carbon.at("factor").at("gco2_per_kwh").get<double>();
  run.carbon.factor.scope = scope_from_string(carbon.at("factor").at("scope").get<std::string>());
  if (!carbon.at("per_inference_kg").is_null()) {
    run.carbon.per_inference_kg = carbon.at("per_inference_kg").get<double>();
  }

  run.latency_ms_per_inference = j.at("latency_ms_per_inference").get<double>();
  if (!j.at("quantization").is_null()) {
    QuantizationInfo info;
    info.bits = j.at("quantization").at("bits").get<int>();
    info.footprint_ratio = j.at("quantization").at("footprint_ratio").get<double>();
    run.quantization = info;
  }
  run.wall_clock_start_ms = j.at("wall_clock").at("start_ms").get<std::int64_t>();
  run.wall_clock_end_ms = j.at("wall_clock").at("end_ms").get<std::int64_t>();
  return run;
}

ordered_json comparison_to_json(const ComparisonReport &c) {
  return ordered_json{{"before_model", c.before_model},
                      {"after_model", c.after_model},
                      {"before_kg_co2e", c.before_kg_co2e},
                      {"after_kg_co2e", c.after_kg_co2e},
                      {"co2_reduction_pct", c.co2_reduction_pct},
                      {"deltas",
                       {{"precision", c.deltas.precision},
                        {"recall", c.deltas.recall},
                        {"f1", c.deltas.f1},
                        {"accuracy", c.deltas.accuracy}}}};
}

ComparisonReport comparison_from_json(const ordered_json &j) {
  ComparisonReport c;
  c.before_model = j.at("before_model").get<std::string>();
  c.after_model = j.at("after_model").get<std::string>();
  c.before_kg_co2e = j.at("before_kg_co2e").get<double>();
  c.after_kg_co2e = j.at("after_kg_co2e").get<double>();
  c.co2_reduction_pct = j.at("co2_reduction_pct").get<double>();
  c.deltas.precision = j.at("deltas").at("precision").get<double>();
  c.deltas.recall = j.at("deltas").at("recall").get<double>();
  c.deltas.f1 = j.at("deltas").at("f1").get<double>();
  c.deltas.accuracy = j.at("deltas").at("accuracy").get<double>();
  return c;
}

} // namespace

std::string emit_json(const ReportDocument &doc) {
  ordered_json j;
  j["schema_version"] = doc.schema_version;
  j["runs"] = ordered_json::array();
  for (const auto &run : doc.runs) {
    j["runs"].push_back(run_to_json(run));
  }
  j["comparisons"] = ordered_json::array();
  for (const auto &c : doc.comparisons) {
    j["comparisons"].push_back(comparison_to_json(c));
  }
  j["provenance"] = {{"energy_provider", doc.provenance.energy_provider},
                     {"factor_file", doc.provenance.factor_file},
                     {"factor_region", doc.provenance.factor_region},
                     {"corpus_path", doc.provenance.corpus_path},
                     {"subset_size", doc.provenance.subset_size},
                     {"subset_seed", doc.provenance.subset_seed},
                     {"tool_version", doc.provenance.tool_version}};
  return j.dump(2) + "\n";
}

ReportDocument parse_report_json(const std::string &json_text) {
  ordered_json j = ordered_json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw IoError("report is not valid JSON");
  }
  ReportDocument doc;
  try {
    doc.schema_version = j.at("schema_version").get<std::string>();
    for (const auto &r : j.at("runs")) {
      doc.runs.push_back(run_from_json(r));
    }
    for (const auto &c : j.at("comparisons")) {
      doc.comparisons.push_back(comparison_from_json(c));
    }
    const auto &p = j.at("provenance");
    doc.provenance.energy_provider = p.at("energy_provider").get<std::string>();
    doc.provenance.factor_file = p.at("factor_file").get<std::string>();
    doc.provenance.factor_region = p.at("factor_region").get<std::string>();
    doc.provenance.corpus_path = p.at("corpus_path").get<std::string>();
    doc.provenance.subset_size = p.at("subset_size").get<std::size_t>();
    doc.provenance.subset_seed = p.at("subset_seed").get<std::uint64_t>();
    doc.provenance.tool_version = p.at("tool_version").get<std::string>();
  } catch (const ordered_json::exception &e) {
    throw IoError(std::string("report schema mismatch: ") + e.what());
  }
  return doc;
}

ReportDocument load_report(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open report: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_report_json(buffer.str());
}

void save_report(const std::string &path, const ReportDocument &doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write report: " + path);
  }
  out << emit_json(doc);
}

std::string format_rounded(double value, int decimals) {
  double scale = 1.0;
  for (int i = 0; i < decimals; ++i) {
    scale *= 10.0;
  }
  // nearbyint under the default rounding mode is ties-to-even
  const long long scaled = static_cast<long long>(std::nearbyint(value * scale));
  const bool negative = scaled < 0;
  std::string digits = std::to_string(negative ? -scaled : scaled);
  while (digits.size() <= static_cast<std::size_t>(decimals)) {
    digits.insert(digits.begin(), '0');
  }
  std::string out = negative ? "-" : "";
  out += digits.substr(0, digits.size() - decimals);
  if (decimals > 0) {
    out += "." + digits.substr(digits.size() - decimals);
  }
  return out;
}

namespace {

void emit_section(std::ostringstream &out, const std::string &title,
                  const std::vector<const BenchmarkRun *> &runs) {
  out << "### " << title << "\n\n";
  out << "| Model | Precision | Recall | F1 | Accuracy | CO2 (kg) |\n";
  out << "|-------|-----------|--------|----|----------|----------|\n";
  for (const BenchmarkRun *run : runs) {
    out << "| " << run->config.model_name << " | "
        << format_rounded(run->metrics.macro_precision, 2) << " | "
        << format_rounded(run->metrics.macro_recall, 2) << " | "
        << format_rounded(run->metrics.macro_f1, 2) << " | "
        << format_rounded(run->metrics.accuracy, 2) << " | "
        << format_rounded(run->carbon.kg_co2e, 3) << " |\n";
  }
  out << "\n";
}

} // namespace

std::string emit_markdown_table(const ReportDocument &doc) {
  std::vector<const BenchmarkRun *> before;
  std::vector<const BenchmarkRun *> after;
  for (const auto &run : doc.runs) {
    (run.quantization ? after : before).push_back(&run);
  }

  std::ostringstream out;
  emit_section(out, "Before Optimization", before);
  emit_section(out, "After Optimization", after);

  if (!doc.comparisons.empty()) {
    out << "### Comparison\n\n";
    out << "| Before | After | CO2 before (kg) | CO2 after (kg) | Reduction (%) |\n";
    out << "|--------|-------|-----------------|----------------|---------------|\n";
    for (const auto &c : doc.comparisons) {
      out << "| " << c.before_model << " | " << c.after_model << " | "
          << format_rounded(c.before_kg_co2e, 3) << " | " << format_rounded(c.after_kg_co2e, 3)
          << " | " << format_rounded(c.co2_reduction_pct, 1) << " |\n";
    }
    out << "\n";
  }
  return out.str();
}

} // namespace greenbench
