#include "greenbench/corpus.hpp"

#include "greenbench/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace greenbench {

namespace {

// RFC-4180 style reader: quoted fields may contain commas, doubled quotes,
// and newlines.
std::vector<std::vector<std::string>> read_csv_records(std::istream &in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_open = false;

  char c = 0;
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field += '"';
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
    case '"':
      in_quotes = true;
      field_open = true;
      break;
    case ',':
      record.push_back(std::move(field));
      field.clear();
      field_open = true;
      break;
    case '\r':
      break;
    case '\n':
      if (field_open || !field.empty() || !record.empty()) {
        record.push_back(std::move(field));
        field.clear();
        records.push_back(std::move(record));
        record.clear();
        field_open = false;
      }
      break;
    default:
      field += c;
      field_open = true;
      break;
    }
  }
  if (field_open || !field.empty() || !record.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

bool blank_after_trim(const std::string &s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

std::string csv_escape(const std::string &field) {
  const bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs_quotes) {
    return field;
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') {
      out += "\"\"";
    } else {
      out += c;
    }
  }
  out += "\"";
  return out;
}

const std::string kPromptTemplate =
    "Sentiment Assessment Instructions\n"
    "\n"
    "Instructions: Assess the sentiment of the given text by identifying the presence of "
    "sentiment indicators such as emotional language, positive or negative expressions, and "
    "tone shifts. Mark the sentiment as positive, negative, or neutral and provide "
    "reasoning.\n"
    "\n"
    "Text: {content}\n"
    "\n"
    "Sentiment Indicators Checklist:\n"
    "- Emotional Language: Words that convey strong feelings (e.g., joy, anger, sadness, "
    "excitement).\n"
    "- Positive Expressions: Words or phrases that promote positive feelings or optimism.\n"
    "- Negative Expressions: Words or phrases that express criticism or negativity.\n"
    "- Tone Shifts: Noticeable changes in tone that affect how the content is perceived.\n"
    "- Balanced or Neutral Tone: The absence of strong emotional language, implying "
    "neutrality.\n"
    "\n"
    "Response Format:\n"
    "Positive/Negative/Neutral [Reasoning]\n";

} // namespace

Corpus load_corpus_csv(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open dataset: " + path);
  }
  auto records = read_csv_records(in);
  if (records.empty() || records.front().size() != 2 || records.front()[0] != "text" ||
      records.front()[1] != "label") {
    throw MissingHeader(path + ": expected header `text,label`");
  }

  Corpus corpus;
  corpus.source_path = path;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto &row = records[i];
    const std::string row_id = path + ": row " + std::to_string(i + 1);
    if (row.size() != 2) {
      throw MissingHeader(row_id + ": expected 2 columns, got " + std::to_string(row.size()));
    }
    if (blank_after_trim(row[0])) {
      throw EmptyText(row_id + ": empty text");
    }
    Example ex;
    ex.text = row[0];
    try {
      ex.label = label_from_string(row[1]);
    } catch (const BadLabel &) {
      throw BadLabel(row_id + ": bad label `" + row[1] + "`");
    }
    if (ex.label == Label::Unknown) {
      throw BadLabel(row_id + ": bad label `unknown`");
    }
    corpus.examples.push_back(std::move(ex));
  }
  return corpus;
}

void save_corpus_csv(const std::string &path, const Corpus &corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write dataset: " + path);
  }
  out << "text,label\n";
  for (const auto &ex : corpus.examples) {
    out << csv_escape(ex.text) << "," << to_string(ex.label) << "\n";
  }
}

const std::string &prompt_template() { return kPromptTemplate; }

std::string build_prompt(const std::string &text) {
  if (blank_after_trim(text)) {
    throw EmptyText("prompt text is empty");
  }
  static const std::string placeholder = "{content}";
  std::string prompt = kPromptTemplate;
  const std::size_t slot = prompt.find(placeholder);
  prompt.replace(slot, placeholder.size(), text);
  return prompt;
}

Corpus split(const Corpus &corpus, std::size_t n, std::uint64_t seed) {
  if (n < 1 || n > corpus.size()) {
    throw SampleTooLarge("requested " + std::to_string(n) + " of " +
                         std::to_string(corpus.size()) + " examples");
  }
  std::vector<std::size_t> indices(corpus.size());
  std::iota(indices.begin(), indices.end(), std::size_t{0});

  // Partial Fisher-Yates with a plain modulo draw; std::uniform_int_distribution
  // is implementation-defined and would break cross-platform determinism.
  std::mt19937_64 gen(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(gen() % (indices.size() - i));
    std::swap(indices[i], indices[j]);
  }
  indices.resize(n);
  std::sort(indices.begin(), indices.end()); // keep corpus order

  Corpus subset;
  subset.source_path = corpus.source_path;
  subset.examples.reserve(n);
  for (std::size_t idx : indices) {
    subset.examples.push_back(corpus.examples[idx]);
  }
  return subset;
}

} // namespace greenbench
