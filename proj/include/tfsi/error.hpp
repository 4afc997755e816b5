#pragma once

#include <stdexcept>
#include <string>

namespace tfsi {

enum class ErrorKind {
    kParse,
    kInvalidArgument,
    kNumeric,
    kIo,
    kConfig,
    kMissingInput,
    kStage,
};

const char* to_string(ErrorKind kind);

/// Library-wide exception. `kind` drives CLI exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace tfsi
