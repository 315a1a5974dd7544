#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace treegraft {

// Base class for every error the library reports.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed bracketed tree; offset is a character position in the input line.
class TreeParseError : public Error {
public:
    TreeParseError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// Malformed line in a line-oriented file (standoff, alignment, grammar, config).
// Line numbers are 1-based.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace treegraft
