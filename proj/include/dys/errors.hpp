#pragma once

#include <stdexcept>
#include <string>

namespace dys {

// Broad failure categories, used by the CLI to pick exit codes.
enum class ErrorCategory { Config, Numerical, Invariant };

class Error : public std::runtime_error {
public:
  Error(ErrorCategory cat, std::string code, const std::string& msg)
      : std::runtime_error(code + ": " + msg), category_(cat), code_(std::move(code)) {}
  ErrorCategory category() const noexcept { return category_; }
  const std::string& code() const noexcept { return code_; }

private:
  ErrorCategory category_;
  std::string code_;
};

#define DYS_DEFINE_ERROR(Name, Category)                                     \
  class Name : public Error {                                                \
  public:                                                                    \
    explicit Name(const std::string& msg)                                    \
        : Error(ErrorCategory::Category, #Name, msg) {}                      \
  }

DYS_DEFINE_ERROR(DimensionMismatch, Numerical);
DYS_DEFINE_ERROR(SingularMatrix, Numerical);
DYS_DEFINE_ERROR(NotSymmetric, Numerical);
DYS_DEFINE_ERROR(NonFiniteValue, Numerical);
DYS_DEFINE_ERROR(SubproblemNotConverged, Numerical);
DYS_DEFINE_ERROR(MetricSingular, Numerical);

DYS_DEFINE_ERROR(GammaOutOfRange, Config);
DYS_DEFINE_ERROR(AlphaNonPositive, Config);
DYS_DEFINE_ERROR(UnknownProblem, Config);
DYS_DEFINE_ERROR(BadParams, Config);
DYS_DEFINE_ERROR(BadConfig, Config);
DYS_DEFINE_ERROR(ModeMismatch, Config);

DYS_DEFINE_ERROR(SchemaError, Config);

DYS_DEFINE_ERROR(NotCritical, Invariant);
DYS_DEFINE_ERROR(NotFixedPoint, Invariant);
DYS_DEFINE_ERROR(AssumptionThreeViolated, Invariant);
DYS_DEFINE_ERROR(HessianUnavailable, Invariant);
DYS_DEFINE_ERROR(CorrespondenceViolated, Invariant);

#undef DYS_DEFINE_ERROR

/// Config text rejected before schema checks; carries the source line.
class ParseError : public Error {
public:
  ParseError(int line, const std::string& msg)
      : Error(ErrorCategory::Config, "ParseError",
              "line " + std::to_string(line) + ": " + msg),
        line_(line) {}
  int line() const noexcept { return line_; }

private:
  int line_;
};

}  // namespace dys
