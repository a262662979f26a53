#pragma once

#include <stdexcept>
#include <string>

namespace qts {

// Failure categories. The CLI maps these onto process exit codes, so every
// throwing code path in the library picks the kind deliberately:
//   Shape / Capacity / Domain   -> caller handed us an ill-formed request
//   DegenerateInput             -> the math cannot proceed (zero vector, ...)
//   Unitarity                   -> a supplied operator is not norm-preserving
//   ImpossibleOutcome           -> postselection on a zero-probability branch
//   RankDeficiency              -> singular linear system during fitting
//   Unsupported                 -> a valid object used in an unsupported way
//   Io / Validation             -> file and input-data problems
enum class ErrorKind {
  Shape,
  Capacity,
  Domain,
  DegenerateInput,
  Unitarity,
  ImpossibleOutcome,
  RankDeficiency,
  Unsupported,
  Io,
  Validation,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct ShapeError : Error {
  explicit ShapeError(const std::string& w) : Error(ErrorKind::Shape, w) {}
};
struct CapacityError : Error {
  explicit CapacityError(const std::string& w) : Error(ErrorKind::Capacity, w) {}
};
struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(ErrorKind::Domain, w) {}
};
struct DegenerateInputError : Error {
  explicit DegenerateInputError(const std::string& w)
      : Error(ErrorKind::DegenerateInput, w) {}
};
struct UnitarityError : Error {
  explicit UnitarityError(const std::string& w) : Error(ErrorKind::Unitarity, w) {}
};
struct ImpossibleOutcomeError : Error {
  explicit ImpossibleOutcomeError(const std::string& w)
      : Error(ErrorKind::ImpossibleOutcome, w) {}
};
struct RankDeficiencyError : Error {
  explicit RankDeficiencyError(const std::string& w)
      : Error(ErrorKind::RankDeficiency, w) {}
};
struct UnsupportedError : Error {
  explicit UnsupportedError(const std::string& w)
      : Error(ErrorKind::Unsupported, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorKind::Io, w) {}
};
struct ValidationError : Error {
  explicit ValidationError(const std::string& w)
      : Error(ErrorKind::Validation, w) {}
};

}  // namespace qts
