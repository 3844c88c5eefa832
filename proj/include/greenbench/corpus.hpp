#pragma once

/**
 * Labeled sentiment dataset ingest and prompt rendering.
 *
 * Dataset CSV: UTF-8, header `text,label`, labels in
 * {positive, negative, neutral} case-insensitive, RFC-4180 quoting.
 */

#include "greenbench/metrics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace greenbench {

struct Example {
  std::string text; // non-empty after trimming
  Label label = Label::Neutral;
};

struct Corpus {
  std::vector<Example> examples;
  std::string source_path;

  std::size_t size() const { return examples.size(); }
};

Corpus load_corpus_csv(const std::string &path);
void save_corpus_csv(const std::string &path, const Corpus &corpus);

// The canonical prompt text with the {content} slot filled in.
std::string build_prompt(const std::string &text);
const std::string &prompt_template();

// Deterministic subsample of size n (seeded); corpus order is preserved,
// n == corpus size returns the full corpus unchanged.
Corpus split(const Corpus &corpus, std::size_t n, std::uint64_t seed);

} // namespace greenbench
