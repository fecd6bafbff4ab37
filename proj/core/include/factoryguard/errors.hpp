#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace fg {

// Error hierarchy shared by every layer. Each carries enough context for a
// caller to report the failing field or entity without re-parsing messages.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Precondition on a numeric argument violated (negative depth, zero norm, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Array or image dimensions disagree.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Caller-supplied input outside what an operation accepts (blocked start cell, ...).
class InputError : public Error {
public:
    using Error::Error;
};

// Structured-text payload failed validation; `field` is a JSON-pointer-like path.
class SchemaError : public Error {
public:
    SchemaError(std::string field, const std::string& what)
        : Error("schema error at '" + field + "': " + what), field_(std::move(field)) {}
    [[nodiscard]] const std::string& field() const { return field_; }

private:
    std::string field_;
};

// Malformed text; line and column are 1-based (0 when unknown).
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : Error("parse error at line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}
    [[nodiscard]] std::size_t line() const { return line_; }
    [[nodiscard]] std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

// Well-formed input that references entities that do not exist.
class SemanticError : public Error {
public:
    SemanticError(std::string id, const std::string& what) : Error(what), id_(std::move(id)) {}
    [[nodiscard]] const std::string& id() const { return id_; }

private:
    std::string id_;
};

}  // namespace fg
