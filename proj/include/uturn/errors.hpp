#ifndef UTURN_ERRORS_HPP
#define UTURN_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace uturn {

/// Syntax error in a program or assertion, with 1-based source position.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ", col " +
                           std::to_string(col) + ")"),
        line_(line), col_(col) {}

  int line() const { return line_; }
  int col() const { return col_; }

private:
  int line_;
  int col_;
};

/// Raised when an exact computation would exceed the configured enumeration budget.
class BudgetError : public std::runtime_error {
public:
  explicit BudgetError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A derivation node failed its rule's side conditions. Carries the path of
/// child indices from the root to the offending node.
class CheckError : public std::runtime_error {
public:
  CheckError(std::vector<int> path, const std::string& msg)
      : std::runtime_error(msg + " (at node " + format_path(path) + ")"),
        path_(std::move(path)) {}

  const std::vector<int>& path() const { return path_; }

  static std::string format_path(const std::vector<int>& p) {
    std::string s = "/";
    for (int i : p) s += std::to_string(i) + "/";
    return s;
  }

private:
  std::vector<int> path_;
};

/// An algorithm was invoked outside its stated preconditions.
class PreconditionError : public std::runtime_error {
public:
  explicit PreconditionError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace uturn

#endif
