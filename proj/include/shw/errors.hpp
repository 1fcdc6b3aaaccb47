#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace shw {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration (violated precondition).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// An attachment point coincides with its motor; the string direction is undefined.
class DegenerateString : public Error {
public:
    DegenerateString(std::size_t string_index, double distance)
        : Error("string " + std::to_string(string_index) + " is degenerate: attachment is " +
                std::to_string(distance) + " m from its motor"),
          string_index_(string_index) {}
    std::size_t string_index() const { return string_index_; }

private:
    std::size_t string_index_;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

/// The pose estimate is ambiguous: the length Jacobian has rank < 6.
class RankDeficient : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class EmptyMesh : public Error {
public:
    using Error::Error;
};

class DegenerateLight : public Error {
public:
    using Error::Error;
};

class ScriptError : public ParseError {
public:
    using ParseError::ParseError;
};

class BindError : public Error {
public:
    using Error::Error;
};

}  // namespace shw
