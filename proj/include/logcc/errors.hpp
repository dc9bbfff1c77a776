#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace logcc {

/// Violated precondition (bad parameter, empty support, non-even measure ...).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Point outside the grid box.
class DomainError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Malformed input file; carries a 1-based position.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : std::runtime_error(what + " (line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ")"),
          line_(line), column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_, column_;
};

}  // namespace logcc
