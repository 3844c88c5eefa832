#pragma once

// Shared test helpers: fixture paths, the pinned separable synthetic corpus,
// and a brute-force metrics oracle kept independent of the library path it
// checks.

#include "greenbench/corpus.hpp"
#include "greenbench/metrics.hpp"

#include <random>
#include <string>
#include <utility>
#include <vector>

namespace testutil {

inline std::string fixture_path(const std::string &name) {
  return std::string(GREENBENCH_FIXTURES_DIR) + "/" + name;
}

// Three disjoint keyword vocabularies, so a linear bag-of-words model can
// separate the classes exactly. Deterministic for a fixed (n, seed).
inline greenbench::Corpus make_separable_corpus(std::size_t n, std::uint64_t seed = 42) {
  static const std::vector<std::string> positive_words = {
      "gain", "rally", "surge", "upbeat", "record", "profit", "boom", "upgrade"};
  static const std::vector<std::string> negative_words = {
      "loss", "selloff", "slump", "downbeat", "miss", "deficit", "crash", "downgrade"};
  static const std::vector<std::string> neutral_words = {
      "report", "statement", "scheduled", "filing", "quarterly", "update", "meeting", "notice"};
  static const std::vector<std::string> filler = {"the", "shares", "company", "today",
                                                  "market"};

  const std::vector<std::string> *vocabularies[3] = {&positive_words, &negative_words,
                                                     &neutral_words};
  std::mt19937_64 gen(seed);
  greenbench::Corpus corpus;
  corpus.source_path = "synthetic-separable";
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t cls = i % 3;
    const auto &vocab = *vocabularies[cls];
    std::string text = filler[gen() % filler.size()];
    for (int w = 0; w < 3; ++w) {
      text += " " + vocab[gen() % vocab.size()];
    }
    text += " " + filler[gen() % filler.size()];
    greenbench::Example ex;
    ex.text = text;
    ex.label = static_cast<greenbench::Label>(cls);
    corpus.examples.push_back(std::move(ex));
  }
  return corpus;
}

struct OracleMetrics {
  double precision[3] = {0, 0, 0};
  double recall[3] = {0, 0, 0};
  double f1[3] = {0, 0, 0};
  double macro_precision = 0;
  double macro_recall = 0;
  double macro_f1 = 0;
  double accuracy = 0;
};

// Straight from the definitions: TP/FP/FN counted by looping over the pairs,
// no confusion matrix involved.
inline OracleMetrics
brute_force_metrics(const std::vector<std::pair<greenbench::Label, greenbench::Label>> &pairs) {
  OracleMetrics m;
  std::size_t correct = 0;
  for (int k = 0; k < 3; ++k) {
    const auto cls = static_cast<greenbench::Label>(k);
    std::size_t tp = 0, fp = 0, fn = 0;
    for (const auto &[gold, pred] : pairs) {
      if (gold == cls && pred == cls) {
        ++tp;
      }
      if (gold != cls && pred == cls) {
        ++fp;
      }
      if (gold == cls && pred != cls) {
        ++fn;
      }
    }
    m.precision[k] = (tp + fp) ? double(tp) / double(tp + fp) : 0.0;
    m.recall[k] = (tp + fn) ? double(tp) / double(tp + fn) : 0.0;
    m.f1[k] = (m.precision[k] + m.recall[k] > 0)
                  ? 2 * m.precision[k] * m.recall[k] / (m.precision[k] + m.recall[k])
                  : 0.0;
    m.macro_precision += m.precision[k] / 3.0;
    m.macro_recall += m.recall[k] / 3.0;
    m.macro_f1 += m.f1[k] / 3.0;
  }
  for (const auto &[gold, pred] : pairs) {
    if (gold == pred) {
      ++correct;
    }
  }
  m.accuracy = double(correct) / double(pairs.size());
  return m;
}

} // namespace testutil
