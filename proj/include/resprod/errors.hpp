#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace resprod {

// Syntax error with a 1-based source position and the set of tokens that
// would have been accepted at that point.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& message, int line, int col,
             std::vector<std::string> expected = {})
      : std::runtime_error(format_message(message, line, col, expected)),
        line_(line), col_(col), expected_(std::move(expected)) {}

  int line() const { return line_; }
  int col() const { return col_; }
  const std::vector<std::string>& expected() const { return expected_; }

private:
  static std::string format_message(const std::string& message, int line, int col,
                                    const std::vector<std::string>& expected) {
    std::string s = std::to_string(line) + ":" + std::to_string(col) + ": " + message;
    if (!expected.empty()) {
      s += " (expected ";
      for (size_t i = 0; i < expected.size(); ++i) {
        if (i) s += ", ";
        s += expected[i];
      }
      s += ")";
    }
    return s;
  }

  int line_;
  int col_;
  std::vector<std::string> expected_;
};

// A configured search/size cap was exceeded.  The CLI maps this to exit code 3.
class ResourceLimitError : public std::runtime_error {
public:
  explicit ResourceLimitError(const std::string& message) : std::runtime_error(message) {}
};

// Evaluation-time misuse: unbound variable, arity mismatch, sentence expected.
class EvalError : public std::runtime_error {
public:
  explicit EvalError(const std::string& message) : std::runtime_error(message) {}
};

// A sentence handed to the direct product oracle is not a block of
// existentials (resp. universals) over a quantifier-free matrix.
class ShapeError : public std::runtime_error {
public:
  explicit ShapeError(const std::string& message) : std::runtime_error(message) {}
};

// Ring table validation failure (associativity, identities, ...).
class RingAxiomError : public std::runtime_error {
public:
  explicit RingAxiomError(const std::string& message) : std::runtime_error(message) {}
};

// A stalk has idempotents besides 0 and 1.
class NotConnectedError : public std::runtime_error {
public:
  explicit NotConnectedError(const std::string& message) : std::runtime_error(message) {}
};

// The restricting formula does not carve out a unital subring; the message
// names a violated closure instance.
class NotUnitalSubringError : public std::runtime_error {
public:
  explicit NotUnitalSubringError(const std::string& message) : std::runtime_error(message) {}
};

// Element construction errors.
class DefaultViolatesPhiError : public std::runtime_error {
public:
  explicit DefaultViolatesPhiError(const std::string& message) : std::runtime_error(message) {}
};

class BadCarrierError : public std::runtime_error {
public:
  explicit BadCarrierError(const std::string& message) : std::runtime_error(message) {}
};

class ModelMismatchError : public std::runtime_error {
public:
  explicit ModelMismatchError(const std::string& message) : std::runtime_error(message) {}
};

// patch_witness called although the finiteness premise fails.
class PremiseViolatedError : public std::runtime_error {
public:
  explicit PremiseViolatedError(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace resprod
