#pragma once

#include <stdexcept>
#include <string>

namespace sfr {

// Malformed configuration (scripts file, bad range syntax).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed data that violates a domain invariant (overlapping ranges,
// start > end, out-of-range code point).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data: malformed JSONL/CSV, missing fields, encoding errors,
// unknown ids, undefined metrics.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sfr
