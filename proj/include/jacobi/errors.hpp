#pragma once

#include <stdexcept>
#include <string>

namespace jacobi {

enum class ErrorKind {
  Validation,
  NotTransversal,
  NotInChart,
  SearchExhausted,
  ChartFailure,
  NotRegular,
  NotMonotone,
  EndpointOnTrain,
  SubdivisionFailure,
  ParityError,
  DegenerateEndpoint,
  RankDrop,
  DimensionDefect,
  NoConvergence,
  BlowUp,
  TangentFiber,
  ReductionRefused,
};

const char* to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can tell bad input apart from numerical breakdown.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const { return kind_; }
  bool is_validation() const { return kind_ == ErrorKind::Validation; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace jacobi
