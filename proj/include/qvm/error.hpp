#pragma once

#include <stdexcept>
#include <string>

namespace qvm {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent input data (calibration files, pool files,
// configuration). The message names the offending entity.
struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(what) {}
};

// Source-level problems in an OpenQASM file. Carries line/column so the
// CLI can point at the offending token.
struct ParseError : Error {
    ParseError(const std::string& msg, int line, int column)
        : Error(msg + " (line " + std::to_string(line) + ", column " +
                std::to_string(column) + ")"),
          line(line),
          column(column) {}

    int line;
    int column;
};

}  // namespace qvm
