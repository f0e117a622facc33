#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace investval {

// Base class for every error the engine raises on purpose.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string &what) : std::runtime_error(what) {}
};

// Filesystem-level failure; message carries path and cause.
class IoError : public Error {
  public:
    using Error::Error;
};

// Bad manifest, scenario, or run configuration.
class ConfigError : public Error {
  public:
    using Error::Error;
};

// Sweep axis names a parameter that does not exist.
class UnknownParameter : public ConfigError {
  public:
    using ConfigError::ConfigError;
};

// Common base for structured-file parse failures.
class ParseError : public Error {
  public:
    using Error::Error;
};

// A CSV row that cannot be decoded; reports line number and offending column.
class MalformedRow : public ParseError {
  public:
    MalformedRow(const std::string &what, std::size_t line, std::string column)
        : ParseError(what), line_(line), column_(std::move(column)) {}

    std::size_t line() const { return line_; }
    const std::string &column() const { return column_; }

  private:
    std::size_t line_;
    std::string column_;
};

// Observation references an indicator id that was never declared.
class UnknownIndicator : public ParseError {
  public:
    using ParseError::ParseError;
};

// Same indicator id declared twice, or a second observation for one
// (country, indicator) pair.
class DuplicateDefinition : public ParseError {
  public:
    using ParseError::ParseError;
};

// Required key absent from a profile or scenario document.
class MissingField : public ParseError {
  public:
    using ParseError::ParseError;
};

// Value outside its documented domain (shares, ratios, monetary signs).
class RangeViolation : public Error {
  public:
    using Error::Error;
};

// Z-score normalization over a series with no available values.
class AllMissing : public Error {
  public:
    using Error::Error;
};

// Country has no usable indicator in the requested pillar.
class NoDataForPillar : public Error {
  public:
    using Error::Error;
};

// Rank falls outside the coverage of the discount tier table.
class RankOutOfRange : public Error {
  public:
    using Error::Error;
};

// Gordon growth terminal value with rate <= growth.
class GordonInvalid : public Error {
  public:
    using Error::Error;
};

// Pro-forma projection fed a negative revenue (nonviable market forced through).
class NonviableRevenue : public Error {
  public:
    using Error::Error;
};

} // namespace investval
