#pragma once

/**
 * Uniform per-tensor affine quantization.
 *
 * A float32 tensor is mapped onto 2^b integer levels via
 *   code_i = round((w_i - min(w)) / delta),  delta = (max(w) - min(w)) / (2^b - 1)
 * and reconstructed with code_i * delta + min(w). Constant tensors quantize
 * to delta = 0 with all-zero codes.
 */

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace greenbench {

struct WeightTensor {
  std::vector<std::size_t> shape;
  std::vector<float> values;

  std::size_t element_count() const { return values.size(); }

  // Throws EmptyTensor / NonFiniteInput / ShapeMismatch.
  void validate() const;
};

struct QuantizedTensor {
  std::vector<std::size_t> shape;
  std::vector<std::uint8_t> codes; // each in [0, 2^bits - 1]
  int bits = 4;                    // in [2, 8]
  float delta = 0.0f;
  float minimum = 0.0f;

  std::size_t element_count() const { return codes.size(); }
  std::uint32_t max_code() const { return (1u << bits) - 1u; }

  void validate() const;
};

struct QuantErrorStats {
  double max_abs_error = 0.0;
  double mean_squared_error = 0.0;
  double delta = 0.0;
};

QuantizedTensor quantize(const WeightTensor &w, int bits);
WeightTensor dequantize(const QuantizedTensor &q);
QuantErrorStats quant_error(const WeightTensor &w, int bits);

// Packed sizes in bytes. Float tensors are 4 bytes per element; quantized
// tensors pack codes at `bits` per element plus 8 bytes of affine parameters.
std::size_t memory_footprint(const WeightTensor &t);
std::size_t memory_footprint(const QuantizedTensor &t);

// Tensor fixture format: first line space-separated shape, second line
// space-separated decimal values.
WeightTensor load_tensor(const std::string &path);
void save_tensor(const std::string &path, const WeightTensor &t);

// Quantized file format: line 1 shape, line 2 "bits delta minimum",
// line 3 space-separated codes.
QuantizedTensor load_quantized(const std::string &path);
void save_quantized(const std::string &path, const QuantizedTensor &q);

} // namespace greenbench
