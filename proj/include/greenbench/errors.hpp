#pragma once

#include <stdexcept>
#include <string>

namespace greenbench {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

// quantize / tensors
struct EmptyTensor : Error {
  using Error::Error;
};
struct NonFiniteInput : Error {
  using Error::Error;
};
struct BitsOutOfRange : Error {
  using Error::Error;
};
struct ShapeMismatch : Error {
  using Error::Error;
};

// energy
struct EmptyTrace : Error {
  using Error::Error;
};
struct UnsortedTrace : Error {
  using Error::Error;
};
struct ZeroRange : Error {
  using Error::Error;
};
struct NegativePower : Error {
  using Error::Error;
};

// carbon
struct ZeroInferences : Error {
  using Error::Error;
};
struct UnknownRegion : Error {
  using Error::Error;
};
struct MalformedFactorFile : Error {
  using Error::Error;
};

// metrics
struct EmptyEvaluation : Error {
  using Error::Error;
};
struct UnknownGold : Error {
  using Error::Error;
};
struct EmptyMatrix : Error {
  using Error::Error;
};

// corpus
struct MissingHeader : Error {
  using Error::Error;
};
struct BadLabel : Error {
  using Error::Error;
};
struct EmptyText : Error {
  using Error::Error;
};
struct SampleTooLarge : Error {
  using Error::Error;
};

// runner / http
struct ModelUnreachable : Error {
  ModelUnreachable(const std::string &msg, std::size_t completed)
      : Error(msg), completed_inferences(completed) {}
  std::size_t completed_inferences = 0;
};
struct ConnectionFailed : Error {
  using Error::Error;
};
struct HttpError : Error {
  HttpError(const std::string &msg, int status_code)
      : Error(msg), status(status_code) {}
  int status = 0;
};
struct MalformedResponse : Error {
  using Error::Error;
};
struct CorpusMismatch : Error {
  using Error::Error;
};

// files
struct IoError : Error {
  using Error::Error;
};

} // namespace greenbench
