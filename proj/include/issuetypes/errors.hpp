#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace issuetypes {

// Malformed input file (JSON, JSONL, CSV). Carries enough context to point at
// the offending line.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally valid input that violates a corpus or model invariant.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

class NotFoundError : public std::runtime_error {
 public:
  explicit NotFoundError(const std::string& msg) : std::runtime_error(msg) {}
};

class RateLimitError : public std::runtime_error {
 public:
  RateLimitError(const std::string& msg, std::int64_t reset_epoch_seconds)
      : std::runtime_error(msg), reset_epoch_seconds_(reset_epoch_seconds) {}

  std::int64_t reset_epoch_seconds() const { return reset_epoch_seconds_; }

 private:
  std::int64_t reset_epoch_seconds_;
};

class HttpError : public std::runtime_error {
 public:
  HttpError(const std::string& msg, int status) : std::runtime_error(msg), status_(status) {}

  int status() const { return status_; }

 private:
  int status_;
};

// Persisted artifact written by a newer (or unknown) format revision.
class FormatVersionError : public std::runtime_error {
 public:
  explicit FormatVersionError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace issuetypes
