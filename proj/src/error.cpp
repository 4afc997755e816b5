#include "tfsi/error.hpp"

namespace tfsi {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::kParse: return "parse";
        case ErrorKind::kInvalidArgument: return "invalid_argument";
        case ErrorKind::kNumeric: return "numeric";
        case ErrorKind::kIo: return "io";
        case ErrorKind::kConfig: return "config";
        case ErrorKind::kMissingInput: return "missing_input";
        case ErrorKind::kStage: return "stage";
    }
    return "unknown";
}

}  // namespace tfsi
