#pragma once

#include <stdexcept>
#include <string>

namespace patchsim {

/// Base class for all patchsim errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Violated precondition or API misuse (bad arity, missing probe, a = 0, ...).
class ContractError : public Error {
public:
    explicit ContractError(const std::string& what) : Error(what) {}
};

/// Argument outside its documented domain (time off the grid, ADC overrange).
class RangeError : public Error {
public:
    explicit RangeError(const std::string& what) : Error(what) {}
};

/// Netlist text that does not match the grammar. Carries the source position.
class ParseError : public Error {
public:
    ParseError(int line, int column, const std::string& message)
        : Error(format(line, column, message)), line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    static std::string format(int line, int column, const std::string& message) {
        return "line " + std::to_string(line) + ":" + std::to_string(column) + ": " + message;
    }
    int line_ = 0;
    int column_ = 0;
};

/// Structurally parseable netlist that fails semantic checks (arity,
/// undriven nets, algebraic loops). Carries the line of the offending
/// declaration when one exists.
class ValidateError : public Error {
public:
    explicit ValidateError(const std::string& message, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
          line_(line) {}

    int line() const { return line_; }

private:
    int line_ = 0;
};

/// A simulation produced a non-finite or absurdly large value. Names the
/// first offending block and the simulation time.
class DivergedError : public Error {
public:
    DivergedError(const std::string& block, double time)
        : Error("simulation diverged at block '" + block + "', t = " + std::to_string(time)),
          block_(block), time_(time) {}

    const std::string& block() const { return block_; }
    double time() const { return time_; }

private:
    std::string block_;
    double time_ = 0.0;
};

/// A digit voltage or numeral digit outside its legal set.
class MalformedDigitError : public Error {
public:
    explicit MalformedDigitError(const std::string& what) : Error(what) {}
};

} // namespace patchsim
