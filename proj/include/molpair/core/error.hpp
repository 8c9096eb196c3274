//
// Project MolPair - Copyright 2026 MolPair Developers.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace molpair {

// Coarse failure categories, mapped onto CLI exit codes.
enum class ErrorCategory { config = 2, data = 3, runtime = 4 };

class Error : public std::runtime_error {
public:
  Error(std::string msg, ErrorCategory cat = ErrorCategory::runtime)
      : std::runtime_error(std::move(msg)), category_(cat) {}

  ErrorCategory category() const noexcept { return category_; }

private:
  ErrorCategory category_;
};

// Input text could not be parsed; position is a 0-based offset into the input.
class ParseError : public Error {
public:
  ParseError(std::string msg, std::size_t position)
      : Error(std::move(msg) + " (at position " + std::to_string(position) + ")",
              ErrorCategory::data),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

class ShapeError : public Error {
public:
  explicit ShapeError(std::string msg) : Error(std::move(msg)) {}
};

class KindError : public Error {
public:
  explicit KindError(std::string msg) : Error(std::move(msg)) {}
};

class ArityError : public Error {
public:
  explicit ArityError(std::string msg) : Error(std::move(msg)) {}
};

class CycleError : public Error {
public:
  explicit CycleError(std::string msg) : Error(std::move(msg)) {}
};

class DimensionMismatch : public Error {
public:
  explicit DimensionMismatch(std::string msg) : Error(std::move(msg)) {}
};

class AdapterUnavailable : public Error {
public:
  explicit AdapterUnavailable(std::string msg)
      : Error(std::move(msg), ErrorCategory::config) {}
};

class VocabularyMissing : public Error {
public:
  explicit VocabularyMissing(std::string msg)
      : Error(std::move(msg), ErrorCategory::config) {}
};

class EmptySequence : public Error {
public:
  explicit EmptySequence(std::string msg) : Error(std::move(msg), ErrorCategory::data) {}
};

class SequenceTooShort : public Error {
public:
  explicit SequenceTooShort(std::string msg)
      : Error(std::move(msg), ErrorCategory::data) {}
};

class EmptyPocket : public Error {
public:
  explicit EmptyPocket(std::string msg) : Error(std::move(msg), ErrorCategory::data) {}
};

class UnknownEncoder : public Error {
public:
  explicit UnknownEncoder(std::string msg)
      : Error(std::move(msg), ErrorCategory::config) {}
};

class DegenerateInput : public Error {
public:
  explicit DegenerateInput(std::string msg) : Error(std::move(msg), ErrorCategory::data) {}
};

class SingleClass : public Error {
public:
  explicit SingleClass(std::string msg) : Error(std::move(msg), ErrorCategory::data) {}
};

class SchemaError : public Error {
public:
  explicit SchemaError(std::string msg) : Error(std::move(msg), ErrorCategory::data) {}
};

class EmptyDataset : public Error {
public:
  explicit EmptyDataset(std::string msg) : Error(std::move(msg), ErrorCategory::data) {}
};

class InsufficientUniverse : public Error {
public:
  explicit InsufficientUniverse(std::string msg)
      : Error(std::move(msg), ErrorCategory::data) {}
};

class NonFiniteLoss : public Error {
public:
  explicit NonFiniteLoss(std::string msg) : Error(std::move(msg)) {}
};

class ConfigError : public Error {
public:
  explicit ConfigError(std::string msg) : Error(std::move(msg), ErrorCategory::config) {}
};

}  // namespace molpair
