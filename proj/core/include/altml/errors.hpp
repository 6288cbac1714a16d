#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace altml {

// Operand shapes disagree (feature dimension, label count, column length).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A learner produced a non-finite weight or coefficient. Usually means the
// step size (or SALT's delta) is far outside the usable range.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace altml
