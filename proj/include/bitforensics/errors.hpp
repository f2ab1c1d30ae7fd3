#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bitforensics {

/// Base of every data error raised by the library. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownClassError : public Error {
 public:
  UnknownClassError(std::string code, std::string kind, const std::string& valid_codes)
      : Error("unknown " + kind + " class '" + code + "' (valid: " + valid_codes + ")"),
        code_(std::move(code)),
        kind_(std::move(kind)) {}

  const std::string& code() const noexcept { return code_; }
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string code_;
  std::string kind_;
};

/// Parse failure with 1-based line number; `file` is empty for in-memory text.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string reason, std::string file = {})
      : Error(format(file, line, reason)), file_(std::move(file)), line_(line), reason_(std::move(reason)) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

  ParseError with_file(const std::string& file) const { return ParseError(line_, reason_, file); }

 private:
  static std::string format(const std::string& file, std::size_t line, const std::string& reason) {
    std::string where = file.empty() ? std::string("line ") : file + ":";
    return where + std::to_string(line) + ": " + reason;
  }

  std::string file_;
  std::size_t line_;
  std::string reason_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& path) : Error("cannot read '" + path + "'"), path_(path) {}
  IoError(const std::string& path, const std::string& what) : Error(what + " '" + path + "'"), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class ManifestError : public Error {
 public:
  using Error::Error;
};

class GreenConflictError : public Error {
 public:
  using Error::Error;
};

class ShapeMismatchError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

class LengthMismatchError : public Error {
 public:
  using Error::Error;
};

class NoGroundTruthError : public Error {
 public:
  using Error::Error;
};

class EmptySetError : public Error {
 public:
  using Error::Error;
};

}  // namespace bitforensics
