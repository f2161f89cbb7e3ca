#ifndef BNBLOC_ERRORS_HPP
#define BNBLOC_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bnbloc {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Input file does not exist or cannot be opened.
class FileNotFoundError : public Error {
 public:
  explicit FileNotFoundError(const std::string& path)
      : Error("file not found: " + path), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Malformed input file. Carries the 1-based line number where parsing failed.
class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& reason)
      : Error(path + ":" + std::to_string(line) + ": " + reason),
        path_(path),
        line_(line),
        reason_(reason) {}
  const std::string& path() const { return path_; }
  std::size_t line() const { return line_; }
  const std::string& reason() const { return reason_; }

 private:
  std::string path_;
  std::size_t line_;
  std::string reason_;
};

/// Operation requires a non-empty point cloud.
class EmptyCloudError : public Error {
 public:
  explicit EmptyCloudError(const std::string& what = "point cloud is empty")
      : Error(what) {}
};

/// Hash table would exceed the configured memory cap.
class CapacityExceededError : public Error {
 public:
  explicit CapacityExceededError(const std::string& what) : Error(what) {}
};

/// Generic read/write failure.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

/// Bad magic bytes or unsupported version in a binary map file.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error(what) {}
};

/// Scan cannot drive the angular discretization (e.g. zero maximum range).
class DegenerateScanError : public Error {
 public:
  explicit DegenerateScanError(const std::string& what) : Error(what) {}
};

/// Search ranges produce no candidate nodes.
class EmptySearchSpaceError : public Error {
 public:
  explicit EmptySearchSpaceError(const std::string& what) : Error(what) {}
};

/// Exhaustive enumeration would exceed the hard node-count guard.
class TooLargeError : public Error {
 public:
  explicit TooLargeError(const std::string& what) : Error(what) {}
};

/// Scene generation could not place a pose with enough visible surface.
class InfeasiblePoseError : public Error {
 public:
  explicit InfeasiblePoseError(const std::string& what) : Error(what) {}
};

/// Invalid configuration value or inconsistent option combination.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace bnbloc

#endif  // BNBLOC_ERRORS_HPP
