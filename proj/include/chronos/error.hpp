#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace chronos {

enum class ErrorKind {
  InvalidArgument,
  GridMismatch,
  ShapeMismatch,
  SupportViolation,
  ZeroMomentum,
  SingularCommutator,
  PreconditionViolated,
  ZeroDrift,
  NonHermitian,
  Unnormalized,
  OutOfRange,
  OffLattice,
  Config,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure in the library is reported through this type. Numerical
// failures carry the residual that tripped the check.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        std::optional<double> residual = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<double> residual() const noexcept { return residual_; }

 private:
  ErrorKind kind_;
  std::optional<double> residual_;
};

}  // namespace chronos
