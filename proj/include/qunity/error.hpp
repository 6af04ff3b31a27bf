#pragma once

#include <stdexcept>
#include <string>

namespace qunity {

// Base class for all user-facing failures (parse, expand, type, domain).
struct Error : std::runtime_error {
    explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

// Invalid real-constant arithmetic (1/0, ln(0), sqrt(-1), ...).
struct DomainError : Error {
    explicit DomainError(const std::string &msg) : Error(msg) {}
};

struct ParseError : Error {
    int line;
    int column;
    ParseError(const std::string &msg, int line_, int col_)
        : Error(msg + " at " + std::to_string(line_) + ":" + std::to_string(col_)),
          line(line_), column(col_) {}
};

// Definition lookup / metaprogramming / sugar expansion failures.
struct ExpandError : Error {
    explicit ExpandError(const std::string &msg) : Error(msg) {}
};

struct TypeError : Error {
    explicit TypeError(const std::string &msg) : Error(msg) {}
};

struct CompileError : Error {
    explicit CompileError(const std::string &msg) : Error(msg) {}
};

// Broken internal invariant; exit code 2 territory, never a user error.
struct InternalError : std::logic_error {
    explicit InternalError(const std::string &msg) : std::logic_error(msg) {}
};

} // namespace qunity
