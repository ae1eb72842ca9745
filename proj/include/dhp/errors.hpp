#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dhp {

enum class ErrorCode {
  NotPrime,
  RamifiedP2,
  BadGenerator,
  NotAUnit,
  LevelMismatch,
  PrecisionExhausted,
  RankDeficient,
  NoForm,
  NotNested,
  NoFraming,
  NotTauStable,
  DescentObstruction,
  WrongType,
  DegenerateReduction,
  NotUnimodular,
  NotAdmissible,
  InvalidSquare,
  LineNotInQuotient,
  BoxTooLarge,
  RadiusTooLarge,
  OutOfBall,
  ConfigError,
};

inline std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::NotPrime: return "NotPrime";
    case ErrorCode::RamifiedP2: return "RamifiedP2";
    case ErrorCode::BadGenerator: return "BadGenerator";
    case ErrorCode::NotAUnit: return "NotAUnit";
    case ErrorCode::LevelMismatch: return "LevelMismatch";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NoForm: return "NoForm";
    case ErrorCode::NotNested: return "NotNested";
    case ErrorCode::NoFraming: return "NoFraming";
    case ErrorCode::NotTauStable: return "NotTauStable";
    case ErrorCode::DescentObstruction: return "DescentObstruction";
    case ErrorCode::WrongType: return "WrongType";
    case ErrorCode::DegenerateReduction: return "DegenerateReduction";
    case ErrorCode::NotUnimodular: return "NotUnimodular";
    case ErrorCode::NotAdmissible: return "NotAdmissible";
    case ErrorCode::InvalidSquare: return "InvalidSquare";
    case ErrorCode::LineNotInQuotient: return "LineNotInQuotient";
    case ErrorCode::BoxTooLarge: return "BoxTooLarge";
    case ErrorCode::RadiusTooLarge: return "RadiusTooLarge";
    case ErrorCode::OutOfBall: return "OutOfBall";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Every failure in the library is reported through this type; `code()` is
/// the machine-readable part, `what()` carries context.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) { throw Error(code, detail); }

}  // namespace dhp
