#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nebed {

// Every failure raised by the library derives from Error. kind() is a short
// stable token that the CLI prints as the machine-parsable failure reason.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("parse", "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct FormatError : Error {
  explicit FormatError(const std::string& what) : Error("format", what) {}
};

struct BoundsError : Error {
  explicit BoundsError(const std::string& what) : Error("bounds", what) {}
};

struct ArgumentError : Error {
  explicit ArgumentError(const std::string& what) : Error("argument", what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error("io", what) {}
};

struct ManifestError : Error {
  explicit ManifestError(const std::string& what) : Error("manifest", what) {}
};

struct ScheduleViolation : Error {
  explicit ScheduleViolation(const std::string& what) : Error("schedule", what) {}
};

struct OwnershipViolation : Error {
  explicit OwnershipViolation(const std::string& what) : Error("ownership", what) {}
};

struct ChannelClosed : Error {
  explicit ChannelClosed(const std::string& what) : Error("channel", what) {}
};

struct DensityError : Error {
  explicit DensityError(const std::string& what) : Error("density", what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

}  // namespace nebed
