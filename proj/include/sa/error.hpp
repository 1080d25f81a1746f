#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sa
{

    /// Base class for all errors raised by the library.
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// A symbol was used with an arity different from its first declaration.
    class ArityClash : public Error
    {
    public:
        using Error::Error;
    };

    /// Syntax or semantic error in one of the input formats. Line and column are 1-based.
    class ParseError : public Error
    {
    public:
        ParseError(const std::string &message, std::size_t line, std::size_t column)
            : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
              line_(line), column_(column) {}

        std::size_t line() const { return line_; }
        std::size_t column() const { return column_; }

    private:
        std::size_t line_;
        std::size_t column_;
    };

    /// A constraint contains a compound term and cannot be evaluated on a fact store.
    class UnsupportedConstraint : public Error
    {
    public:
        using Error::Error;
    };

} // namespace sa
