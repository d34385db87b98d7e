#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace synoq {

using u8 = std::uint8_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

// Engine-wide RNG; mt19937_64 keeps every run reproducible for a fixed seed.
using Rng = std::mt19937_64;

inline Rng seeded_rng(u64 seed) { return Rng{seed}; }

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidParameter : Error {
  using Error::Error;
};

struct SchemaError : Error {
  using Error::Error;
};

// An equi-join materialization would exceed the configured cell cap.
struct JoinCapExceeded : Error {
  using Error::Error;
};

// A synopsis-assisted operator cannot run because its prerequisites
// (derivable max-frequency and index) are missing.
struct NotApplicable : Error {
  using Error::Error;
};

struct QuerySyntaxError : Error {
  int line = 0;
  int column = 0;
  QuerySyntaxError(const std::string& msg, int l, int c)
      : Error(msg + " (line " + std::to_string(l) + ", column " +
              std::to_string(c) + ")"),
        line(l),
        column(c) {}
};

}  // namespace synoq
