#pragma once

/**
 * Classification quality over the three sentiment classes.
 *
 * Predictions parsed out of free text may be `unknown`; unknown lives in its
 * own predicted column of the confusion matrix, so unparseable generations
 * count against recall instead of being dropped.
 */

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace greenbench {

enum class Label : std::uint8_t { Positive = 0, Negative = 1, Neutral = 2, Unknown = 3 };

inline constexpr std::size_t kNumClasses = 3; // real classes, unknown excluded

std::string to_string(Label label);
Label label_from_string(const std::string &name); // throws BadLabel

// Case-insensitive scan for the first occurrence of a class name anywhere in
// the response text; Unknown when none occurs.
Label parse_label(const std::string &response_text);

struct ConfusionMatrix {
  // gold class (3 rows) x predicted class incl. unknown (4 columns)
  std::array<std::array<std::uint64_t, kNumClasses + 1>, kNumClasses> counts{};

  std::uint64_t total() const;
  ConfusionMatrix &merge(const ConfusionMatrix &other); // counts are additive
};

ConfusionMatrix confusion(const std::vector<std::pair<Label, Label>> &gold_predicted);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricsReport {
  std::array<ClassMetrics, kNumClasses> per_class{};
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::uint64_t unknown_predictions = 0;
};

MetricsReport metrics(const ConfusionMatrix &cm);

} // namespace greenbench
