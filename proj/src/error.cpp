#include "spe/error.hpp"

namespace spe {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ParameterDomain: return "parameter-domain";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Fit: return "fit";
        case ErrorKind::Estimation: return "estimation";
        case ErrorKind::Proposal: return "proposal";
        case ErrorKind::Inference: return "inference";
        case ErrorKind::Curve: return "curve";
        case ErrorKind::Metric: return "metric";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Validation: return "validation";
        case ErrorKind::Normalization: return "normalization";
        case ErrorKind::Io: return "io";
        case ErrorKind::Contract: return "contract";
    }
    return "unknown";
}

}  // namespace spe
