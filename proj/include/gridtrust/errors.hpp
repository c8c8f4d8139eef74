#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace gridtrust {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

/// Wrong participant set: missing, duplicated or extra meters.
class TopologyError : public Error {
 public:
  using Error::Error;
};

class DlogNotFound : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class SignatureError : public Error {
 public:
  SignatureError(std::uint32_t meter_id, const std::string& what)
      : Error(what), meter_id_(meter_id) {}
  std::uint32_t meter_id() const { return meter_id_; }

 private:
  std::uint32_t meter_id_;
};

/// A report whose timestamp differs from the miner's current slot (replay).
class StaleTimestamp : public Error {
 public:
  StaleTimestamp(std::uint32_t meter_id, const std::string& what)
      : Error(what), meter_id_(meter_id) {}
  std::uint32_t meter_id() const { return meter_id_; }

 private:
  std::uint32_t meter_id_;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class NoCandidate : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t row, const std::string& what)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
  explicit ParseError(const std::string& what) : Error(what), row_(0) {}
  /// 1-based line number, 0 when not tied to a row.
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class InsufficientHistory : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

/// API used outside its contract (empty batch, zero trials, zero key).
class MisuseError : public Error {
 public:
  using Error::Error;
};

}  // namespace gridtrust
