#include "jacobi/errors.hpp"

namespace jacobi {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation: return "Validation";
    case ErrorKind::NotTransversal: return "NotTransversal";
    case ErrorKind::NotInChart: return "NotInChart";
    case ErrorKind::SearchExhausted: return "SearchExhausted";
    case ErrorKind::ChartFailure: return "ChartFailure";
    case ErrorKind::NotRegular: return "NotRegular";
    case ErrorKind::NotMonotone: return "NotMonotone";
    case ErrorKind::EndpointOnTrain: return "EndpointOnTrain";
    case ErrorKind::SubdivisionFailure: return "SubdivisionFailure";
    case ErrorKind::ParityError: return "ParityError";
    case ErrorKind::DegenerateEndpoint: return "DegenerateEndpoint";
    case ErrorKind::RankDrop: return "RankDrop";
    case ErrorKind::DimensionDefect: return "DimensionDefect";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::BlowUp: return "BlowUp";
    case ErrorKind::TangentFiber: return "TangentFiber";
    case ErrorKind::ReductionRefused: return "ReductionRefused";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace jacobi
