#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace occ {

enum class ErrorKind {
    Config,             // invalid configuration or parameter combination
    Shape,              // sequence lengths or ranges do not fit
    Domain,             // value outside the admissible set
    SyncFailure,        // no preamble correlation peak above threshold
    UnusableCapture,    // capture carries no modulation
    EstimationSingular, // preamble convolution matrix is rank deficient
    DesignSingular,     // equalizer design matrix is rank deficient
    Io,                 // file read/write or format error
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` distinguishes the failure
/// so callers (the CLI in particular) can map it to an exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Config: return "config";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::SyncFailure: return "sync_failure";
    case ErrorKind::UnusableCapture: return "unusable_capture";
    case ErrorKind::EstimationSingular: return "estimation_singular";
    case ErrorKind::DesignSingular: return "design_singular";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

} // namespace occ
