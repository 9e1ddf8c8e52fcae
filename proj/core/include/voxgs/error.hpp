#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace voxgs {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied value violates a documented precondition.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

// A file could not be opened, read or written. The message names the path.
class IoError : public Error {
public:
  using Error::Error;
};

// A bitstream failed one of the decoder's consistency checks. `check()`
// names the failing check so tools can report it verbatim.
class CorruptStream : public Error {
public:
  CorruptStream(std::string check, const std::string& detail = {})
    : Error(detail.empty() ? check : check + ": " + detail)
    , check_(std::move(check))
  {}

  const std::string& check() const noexcept { return check_; }

private:
  std::string check_;
};

// Malformed anchor file. Line numbers are 1-based; 0 means "whole file".
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& reason, const std::string& source = {})
    : Error(
        (source.empty() ? std::string() : source + ": ")
        + (line ? "line " + std::to_string(line) + ": " : std::string()) + reason)
    , line_(line)
    , reason_(reason)
  {}

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

private:
  std::size_t line_;
  std::string reason_;
};

}  // namespace voxgs
