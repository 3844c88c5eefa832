#include "greenbench/metrics.hpp"

#include "greenbench/errors.hpp"

#include <algorithm>
#include <cctype>

namespace greenbench {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

constexpr const char *kClassNames[kNumClasses] = {"positive", "negative", "neutral"};

} // namespace

std::string to_string(Label label) {
  switch (label) {
  case Label::Positive:
    return "positive";
  case Label::Negative:
    return "negative";
  case Label::Neutral:
    return "neutral";
  case Label::Unknown:
    return "unknown";
  }
  return "unknown";
}

Label label_from_string(const std::string &name) {
  const std::string s = lower(name);
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    if (s == kClassNames[k]) {
      return static_cast<Label>(k);
    }
  }
  if (s == "unknown") {
    return Label::Unknown;
  }
  throw BadLabel("not a sentiment label: " + name);
}

Label parse_label(const std::string &response_text) {
  const std::string haystack = lower(response_text);
  std::size_t best_pos = std::string::npos;
  Label best = Label::Unknown;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const std::size_t pos = haystack.find(kClassNames[k]);
    if (pos != std::string::npos && pos < best_pos) {
      best_pos = pos;
      best = static_cast<Label>(k);
    }
  }
  return best;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t n = 0;
  for (const auto &row : counts) {
    for (std::uint64_t c : row) {
      n += c;
    }
  }
  return n;
}

ConfusionMatrix &ConfusionMatrix::merge(const ConfusionMatrix &other) {
  for (std::size_t g = 0; g < kNumClasses; ++g) {
    for (std::size_t p = 0; p <= kNumClasses; ++p) {
      counts[g][p] += other.counts[g][p];
    }
  }
  return *this;
}

ConfusionMatrix confusion(const std::vector<std::pair<Label, Label>> &gold_predicted) {
  if (gold_predicted.empty()) {
    throw EmptyEvaluation("no (gold, predicted) pairs");
  }
  ConfusionMatrix cm;
  for (const auto &[gold, predicted] : gold_predicted) {
    if (gold == Label::Unknown) {
      throw UnknownGold("gold labels may not be unknown");
    }
    cm.counts[static_cast<std::size_t>(gold)][static_cast<std::size_t>(predicted)] += 1;
  }
  return cm;
}

MetricsReport metrics(const ConfusionMatrix &cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) {
    throw EmptyMatrix("confusion matrix is empty");
  }

  MetricsReport report;
  std::uint64_t diagonal = 0;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const std::uint64_t tp = cm.counts[k][k];
    diagonal += tp;

    std::uint64_t fp = 0; // other golds predicted as k
    for (std::size_t g = 0; g < kNumClasses; ++g) {
      if (g != k) {
        fp += cm.counts[g][k];
      }
    }
    std::uint64_t fn = 0; // gold k predicted otherwise, incl. unknown
    for (std::size_t p = 0; p <= kNumClasses; ++p) {
      if (p != k) {
        fn += cm.counts[k][p];
      }
    }

    ClassMetrics &m = report.per_class[k];
    m.precision = (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    m.recall = (tp + fn) ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.f1 = (m.precision + m.recall > 0.0)
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;

    report.macro_precision += m.precision / kNumClasses;
    report.macro_recall += m.recall / kNumClasses;
    report.macro_f1 += m.f1 / kNumClasses;
    report.unknown_predictions += cm.counts[k][kNumClasses];
  }
  report.accuracy = static_cast<double>(diagonal) / static_cast<double>(total);
  return report;
}

} // namespace greenbench
