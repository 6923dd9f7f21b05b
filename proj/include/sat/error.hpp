#pragma once

#include <stdexcept>
#include <string>

namespace sat {

enum class ErrorKind {
    InvalidArgument,
    Io,
    Parse,
    Config,
    Schema,
    Runtime,
};

/// Library-wide exception. `field` carries the offending config path when
/// the error comes from validation (e.g. "agents[0].start").
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, std::string field = {})
        : std::runtime_error(field.empty() ? what : field + ": " + what),
          kind_(kind),
          field_(std::move(field)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& field() const noexcept { return field_; }

private:
    ErrorKind kind_;
    std::string field_;
};

}  // namespace sat
