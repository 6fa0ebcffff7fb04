#ifndef LYRICBENCH_ERROR_H
#define LYRICBENCH_ERROR_H

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lyricbench {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A file could not be opened or a record in it could not be parsed.
class FormatError : public Error {
 public:
  FormatError(const std::string& path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what), path_(path), line_(line) {}
  explicit FormatError(const std::string& what) : Error(what) {}

  const std::string& path() const { return path_; }
  std::size_t line() const { return line_; }

 private:
  std::string path_;
  std::size_t line_ = 0;
};

}  // namespace lyricbench

#endif  // LYRICBENCH_ERROR_H
