#pragma once

// Shared error types and small utilities used across the library.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace clipsep {

// Contract violation on an operation's input (shape mismatch, empty list,
// clip shorter than one window, ...).
struct InvalidInput : std::invalid_argument {
  explicit InvalidInput(const std::string& msg) : std::invalid_argument(msg) {}
};

// Bad configuration or command-line usage. CLI maps this to exit code 2.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// Missing or unreadable data (files, bank ids). CLI maps this to exit code 4.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed on-disk format; carries the byte offset where parsing failed.
struct FormatError : DataError {
  FormatError(const std::string& msg, std::uint64_t offset)
      : DataError(msg + " (at byte offset " + std::to_string(offset) + ")"),
        byte_offset(offset) {}
  std::uint64_t byte_offset;
};

// Non-finite values where finite ones are required. CLI maps this to exit
// code 3.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

template <class R>
inline bool all_finite(const R* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(p[i])) return false;
  return true;
}

// FNV-1a over raw bytes; used for content hashing in determinism checks.
inline std::uint64_t fnv1a(const void* data, std::size_t n,
                           std::uint64_t seed = 1469598103934665603ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace clipsep
