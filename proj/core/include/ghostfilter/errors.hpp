#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace ghostfilter {

/// Base class for all data and configuration errors raised by the library.
/// The CLI maps any Error to exit code 2 and prints what().
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// First line of a SEG file is not a valid SEGv1 header.
class InvalidHeader : public Error {
public:
    using Error::Error;
};

/// A SEG data row failed field-level validation. Carries the 1-based line
/// number and the name of the offending column.
class MalformedRow : public Error {
public:
    MalformedRow(std::size_t line, std::string column, const std::string& detail)
        : Error("line " + std::to_string(line) + ", column '" + column + "': " + detail),
          line_(line),
          column_(std::move(column)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::string column_;
};

/// Two rows share the dataset key (flight_id, begin_point_id, t_begin).
class DuplicateSegment : public Error {
public:
    using Error::Error;
};

/// Two segments of the same flight overlap in time.
class OverlappingSegments : public Error {
public:
    using Error::Error;
};

/// A programmatically constructed segment violates a field constraint.
class InvalidSegment : public Error {
public:
    using Error::Error;
};

/// Paired datasets do not cover the same day.
class DayMismatch : public Error {
public:
    using Error::Error;
};

/// The same day appears twice in a daily-count input.
class DuplicateDay : public Error {
public:
    using Error::Error;
};

/// Histogram bin edges are not strictly increasing or fewer than two.
class BadEdges : public Error {
public:
    using Error::Error;
};

/// An operation that needs at least one segment got none.
class EmptyDataset : public Error {
public:
    using Error::Error;
};

/// A segment has neither a matched deviation record nor plan-absent status.
class InconsistentDeviations : public Error {
public:
    using Error::Error;
};

/// Filtering removed every segment; the conflict density is undefined.
class EmptyFiltered : public Error {
public:
    using Error::Error;
};

/// The density curve never exhibits the drop the estimator looks for.
class NoTransition : public Error {
public:
    using Error::Error;
};

/// A synthetic-data configuration cannot be realized.
class InfeasibleConfig : public Error {
public:
    using Error::Error;
};

}  // namespace ghostfilter
