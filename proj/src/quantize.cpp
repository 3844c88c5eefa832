#include "greenbench/quantize.hpp"

#include "greenbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace greenbench {

namespace {

std::size_t shape_product(const std::vector<std::size_t> &shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) {
    n *= d;
  }
  return shape.empty() ? 0 : n;
}

} // namespace

void WeightTensor::validate() const {
  if (values.empty()) {
    throw EmptyTensor("tensor has zero elements");
  }
  if (shape_product(shape) != values.size()) {
    throw ShapeMismatch("shape does not match value count");
  }
  for (float v : values) {
    if (!std::isfinite(v)) {
      throw NonFiniteInput("tensor contains NaN or Inf");
    }
  }
}

void QuantizedTensor::validate() const {
  if (codes.empty()) {
    throw EmptyTensor("quantized tensor has zero elements");
  }
  if (bits < 2 || bits > 8) {
    throw BitsOutOfRange("bits must be in [2, 8], got " + std::to_string(bits));
  }
  if (shape_product(shape) != codes.size()) {
    throw ShapeMismatch("shape does not match code count");
  }
  const std::uint32_t top = max_code();
  for (std::uint8_t c : codes) {
    if (c > top) {
      throw ShapeMismatch("code " + std::to_string(c) + " exceeds 2^bits - 1");
    }
  }
  if (delta == 0.0f) {
    for (std::uint8_t c : codes) {
      if (c != 0) {
        throw ShapeMismatch("delta == 0 requires all-zero codes");
      }
    }
  }
}

QuantizedTensor quantize(const WeightTensor &w, int bits) {
  w.validate();
  if (bits < 2 || bits > 8) {
    throw BitsOutOfRange("bits must be in [2, 8], got " + std::to_string(bits));
  }

  const auto [lo_it, hi_it] = std::minmax_element(w.values.begin(), w.values.end());
  const float lo = *lo_it;
  const float hi = *hi_it;
  const std::uint32_t levels = (1u << bits) - 1u;

  QuantizedTensor q;
  q.shape = w.shape;
  q.bits = bits;
  q.minimum = lo;
  q.codes.resize(w.values.size());

  if (hi == lo) {
    q.delta = 0.0f;
    std::fill(q.codes.begin(), q.codes.end(), std::uint8_t{0});
    return q;
  }

  const double range = static_cast<double>(hi) - static_cast<double>(lo);
  q.delta = static_cast<float>(range / static_cast<double>(levels));
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    // (w - min) * levels / range keeps exact midpoints exact (0.5 at 4 bits
    // lands on 7.5, not 7.4999...); std::round is round-half-away-from-zero.
    double code = std::round((static_cast<double>(w.values[i]) - static_cast<double>(lo)) *
                             static_cast<double>(levels) / range);
    code = std::clamp(code, 0.0, static_cast<double>(levels));
    q.codes[i] = static_cast<std::uint8_t>(code);
  }
  return q;
}

WeightTensor dequantize(const QuantizedTensor &q) {
  q.validate();
  WeightTensor w;
  w.shape = q.shape;
  w.values.resize(q.codes.size());
  for (std::size_t i = 0; i < q.codes.size(); ++i) {
    w.values[i] = static_cast<float>(static_cast<double>(q.codes[i]) *
                                         static_cast<double>(q.delta) +
                                     static_cast<double>(q.minimum));
  }
  return w;
}

QuantErrorStats quant_error(const WeightTensor &w, int bits) {
  const QuantizedTensor q = quantize(w, bits);
  const WeightTensor back = dequantize(q);

  QuantErrorStats stats;
  stats.delta = q.delta;
  double sq_sum = 0.0;
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    const double err = std::abs(static_cast<double>(back.values[i]) -
                                static_cast<double>(w.values[i]));
    stats.max_abs_error = std::max(stats.max_abs_error, err);
    sq_sum += err * err;
  }
  stats.mean_squared_error = sq_sum / static_cast<double>(w.values.size());
  return stats;
}

std::size_t memory_footprint(const WeightTensor &t) {
  return 4 * t.element_count();
}

std::size_t memory_footprint(const QuantizedTensor &t) {
  const std::size_t code_bits = t.element_count() * static_cast<std::size_t>(t.bits);
  return (code_bits + 7) / 8 + 8; // packed codes + two float32 affine params
}

namespace {

std::vector<std::size_t> parse_shape_line(const std::string &line, const std::string &path) {
  std::istringstream in(line);
  std::vector<std::size_t> shape;
  long long d = 0;
  while (in >> d) {
    if (d <= 0) {
      throw IoError(path + ": non-positive dimension in shape line");
    }
    shape.push_back(static_cast<std::size_t>(d));
  }
  if (shape.empty()) {
    throw IoError(path + ": empty shape line");
  }
  return shape;
}

} // namespace

WeightTensor load_tensor(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open tensor file: " + path);
  }
  std::string shape_line, value_line;
  if (!std::getline(in, shape_line) || !std::getline(in, value_line)) {
    throw IoError(path + ": expected shape line and value line");
  }
  WeightTensor t;
  t.shape = parse_shape_line(shape_line, path);
  std::istringstream vals(value_line);
  float v = 0.0f;
  while (vals >> v) {
    t.values.push_back(v);
  }
  t.validate();
  return t;
}

void save_tensor(const std::string &path, const WeightTensor &t) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write tensor file: " + path);
  }
  for (std::size_t i = 0; i < t.shape.size(); ++i) {
    out << (i ? " " : "") << t.shape[i];
  }
  out << "\n";
  out.precision(9);
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    out << (i ? " " : "") << t.values[i];
  }
  out << "\n";
}

QuantizedTensor load_quantized(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open quantized tensor file: " + path);
  }
  std::string shape_line, param_line, code_line;
  if (!std::getline(in, shape_line) || !std::getline(in, param_line) ||
      !std::getline(in, code_line)) {
    throw IoError(path + ": expected shape, parameter, and code lines");
  }
  QuantizedTensor q;
  q.shape = parse_shape_line(shape_line, path);
  std::istringstream params(param_line);
  if (!(params >> q.bits >> q.delta >> q.minimum)) {
    throw IoError(path + ": malformed parameter line");
  }
  std::istringstream codes(code_line);
  unsigned c = 0;
  while (codes >> c) {
    if (c > 255) {
      throw IoError(path + ": code out of byte range");
    }
    q.codes.push_back(static_cast<std::uint8_t>(c));
  }
  q.validate();
  return q;
}

void save_quantized(const std::string &path, const QuantizedTensor &q) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write quantized tensor file: " + path);
  }
  for (std::size_t i = 0; i < q.shape.size(); ++i) {
    out << (i ? " " : "") << q.shape[i];
  }
  out << "\n";
  out.precision(9);
  out << q.bits << " " << q.delta << " " << q.minimum << "\n";
  for (std::size_t i = 0; i < q.codes.size(); ++i) {
    out << (i ? " " : "") << static_cast<unsigned>(q.codes[i]);
  }
  out << "\n";
}

} // namespace greenbench
