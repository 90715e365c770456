#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace hdlt {

/// Base class of every exception thrown by the library.
class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Caller supplied a value outside an operation's domain (bad shape, NaN, range).
class invalid_input : public error
{
public:
    using error::error;
};

/// Asymptotic formula requested for a dimension where it is not defined (p < 3).
class unsupported_dimension : public error
{
public:
    using error::error;
};

/// A coordinate whose score vector or debiasing denominator vanished.
class degenerate_coordinate : public error
{
public:
    degenerate_coordinate(std::size_t coordinate, const std::string& what)
        : error(what), coordinate_(coordinate)
    {}

    /// Zero-based column index.
    std::size_t coordinate() const noexcept { return coordinate_; }

private:
    std::size_t coordinate_;
};

/// Rejection sampler made no progress.
class sampling_stall : public error
{
public:
    using error::error;
};

/// Too many replications of a simulation scenario failed.
class scenario_aborted : public error
{
public:
    using error::error;
};

/// Malformed CSV input; row and column are 1-based, 0 when not applicable.
class parse_error : public error
{
public:
    parse_error(std::size_t row, std::size_t column, const std::string& what)
        : error("line " + std::to_string(row) + ", column " + std::to_string(column) + ": " + what),
          row_(row), column_(column)
    {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

/// JSON document does not match the expected schema; carries a JSON pointer.
class schema_error : public error
{
public:
    schema_error(std::string pointer, const std::string& what)
        : error((pointer.empty() ? std::string("/") : pointer) + ": " + what),
          pointer_(std::move(pointer))
    {}

    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

} // namespace hdlt
