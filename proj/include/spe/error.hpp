#pragma once

#include <stdexcept>
#include <string>

namespace spe {

// Error classes exposed by the library. The CLI maps these to exit codes
// and a machine-readable class string, so the set is part of the interface.
enum class ErrorKind {
    ParameterDomain,  // invalid distribution/mixture parameters
    Domain,           // argument outside its documented domain
    Fit,              // MLE fit failed (too few points, degenerate data)
    Estimation,       // MAP / family selection failed on all attempts
    Proposal,         // Laplace proposal fit failed (non-negative curvature)
    Inference,        // importance sampling / label sampling failure
    Curve,            // performance curve undefined (no positives)
    Metric,           // curve metric undefined (disjoint recall ranges)
    Parse,            // malformed input file
    Validation,       // structurally valid input with inconsistent content
    Normalization,    // score normalization impossible
    Io,               // filesystem failure
    Contract,         // precondition violated by the caller
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
          kind_(kind) {}

    ErrorKind kind() const { return kind_; }
    const char* kind_name() const { return error_kind_name(kind_); }

  private:
    ErrorKind kind_;
};

}  // namespace spe
