#pragma once

#include <stdexcept>
#include <string>

namespace powsec {

// Base class for every failure raised by the library. Callers that only care
// about "did it work" can catch this; the CLI maps it to exit code 1.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Malformed input files. Carries enough location information to point a user
// at the offending cell.
class InputError : public Error {
  public:
    InputError(std::string file, std::size_t line, std::string column, const std::string& what)
        : Error(file + ":" + std::to_string(line) + (column.empty() ? "" : " [" + column + "]") + ": " + what),
          file_(std::move(file)),
          line_(line),
          column_(std::move(column)) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }
    const std::string& column() const noexcept { return column_; }

  private:
    std::string file_;
    std::size_t line_;
    std::string column_;
};

}  // namespace powsec
