#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace spma {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

// Probability entries may undershoot zero by at most this much before we
// treat them as genuine simplex violations rather than roundoff.
inline constexpr double kProbFloorTol = 1e-12;

enum class Method {
  spma,
  npg,
  spg,
  mdpo,
  spma_bandit_gap,
};

const char* method_name(Method m);

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidMdp : Error {
  InvalidMdp(std::string field, long index, const std::string& detail)
      : Error("invalid mdp: " + field + "[" + std::to_string(index) + "]: " + detail),
        field(std::move(field)),
        index(index) {}
  std::string field;
  long index;
};

struct InvalidPolicy : Error {
  using Error::Error;
};

struct SingularSystem : Error {
  using Error::Error;
};

struct StepSizeTooLarge : Error {
  using Error::Error;
};

struct InconsistentAdvantage : Error {
  using Error::Error;
};

struct LogitPolicyMismatch : Error {
  using Error::Error;
};

struct InvalidTarget : Error {
  using Error::Error;
};

struct InfeasibleGap : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace spma
