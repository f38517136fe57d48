#pragma once

#include <cstddef>
#include <exception>
#include <optional>
#include <string>
#include <vector>

namespace hedgeql {

enum class ErrorKind {
    // algebra configuration
    MeasureSumViolation,
    EmptyHedgeSide,
    DuplicateName,
    // term parsing
    UnknownWord,
    EmptyInput,
    TermTooDeep,
    // scaling and partitions
    OutOfDomain,
    LevelOutOfRange,
    // matching
    UnmatchableValue,
    // schema / dataset files
    ParseError,
    ValidationError,
    UnknownDependency,
    UnknownTerm,
    DuplicateId,
    MissingAttribute,
    UnsupportedValueKind,
    // query language
    SyntaxError,
    UnknownAttribute,
    UnknownMethod,
    UnmatchableCondition,
    UnsupportedQuery,
    // cli
    UsageError,
};

const char* to_string(ErrorKind kind);

/// Single exception type carrying an error kind, an optional source
/// (file path or JSON path) and, for query-text errors, a byte offset
/// into the query string.
class Error : public std::exception {
public:
    Error(ErrorKind kind, std::string message);

    Error& with_source(std::string source);
    Error& with_position(std::size_t offset);
    Error& with_details(std::vector<std::string> details);

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& message() const noexcept { return message_; }
    const std::optional<std::string>& source() const noexcept { return source_; }
    std::optional<std::size_t> position() const noexcept { return position_; }
    const std::vector<std::string>& details() const noexcept { return details_; }

    const char* what() const noexcept override { return what_.c_str(); }

private:
    void rebuild_what();

    ErrorKind kind_;
    std::string message_;
    std::optional<std::string> source_;
    std::optional<std::size_t> position_;
    std::vector<std::string> details_;
    std::string what_;
};

} // namespace hedgeql
