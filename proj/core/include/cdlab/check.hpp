#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace cdlab {

// Base class for all domain errors raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeError : Error {
  using Error::Error;
};
// Drift too large for the mesh: a jump rate would be negative.
struct StabilityError : Error {
  using Error::Error;
};
// s_r evaluated past the monotone branch (r > 0, sqrt(r) x >= pi).
struct BranchError : Error {
  using Error::Error;
};
struct ScaleError : Error {
  using Error::Error;
};
struct PositivityError : Error {
  using Error::Error;
};
// Every tested function has vanishing carre du champ; no ratio defined.
struct UndefinedRError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

// One verified inequality instance.  Every check is recorded in the
// normal form  lhs <= rhs,  margin = rhs - lhs,  pass <=> margin >= -tolerance.
// Equality checks store |difference| in lhs and 0 in rhs so the same
// convention applies.  `conclusive` is cleared when a limit extrapolation
// did not settle; such a report is neither trusted as pass nor as fail.
struct CheckReport {
  std::string name;
  std::string anchor;   // equation tag, one of known_anchors()
  double t = 0.0;       // time parameter where meaningful, else 0
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool conclusive = true;
  std::map<std::string, std::string> metadata;
};

inline CheckReport make_check(std::string name, std::string anchor, double lhs,
                              double rhs, double tolerance, double t = 0.0) {
  CheckReport r;
  r.name = std::move(name);
  r.anchor = std::move(anchor);
  r.t = t;
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.tolerance = tolerance;
  r.pass = r.margin >= -tolerance;
  return r;
}

// Equation tags used in reports and validated by the config reader.
namespace anchor {
inline constexpr const char* cd_pointwise = "cd.pointwise";
inline constexpr const char* cd_weak = "cd.weak";
inline constexpr const char* contraction_squared = "contraction.squared";
inline constexpr const char* contraction_sfun = "contraction.sfun";
inline constexpr const char* contraction_two_time = "contraction.two-time";
inline constexpr const char* evi = "evi";
inline constexpr const char* refinement_chain = "refinement.chain";
inline constexpr const char* converse_first = "converse.first";
inline constexpr const char* converse_second = "converse.second";
inline constexpr const char* converse_third = "converse.third";
inline constexpr const char* tilted_symmetry = "tilted.symmetry";
inline constexpr const char* equivalence = "equivalence";
inline constexpr const char* gradflow_convexity = "gradflow.convexity";
inline constexpr const char* gradflow_contraction = "gradflow.contraction";
inline constexpr const char* gradflow_converse = "gradflow.converse";
inline constexpr const char* entropy_energy = "ineq.entropy-energy";
inline constexpr const char* log_sobolev = "ineq.log-sobolev";
inline constexpr const char* fisher_decay = "ineq.fisher-decay";
inline constexpr const char* fisher_differential = "ineq.fisher-differential";
inline constexpr const char* entropy_creation = "ineq.entropy-creation";
inline constexpr const char* de_bruijn = "ineq.de-bruijn";
inline constexpr const char* hwi = "ineq.hwi";
inline constexpr const char* hwi_smoothing = "ineq.hwi-smoothing";
inline constexpr const char* metric_derivative = "ineq.metric-derivative";
}  // namespace anchor

bool is_known_anchor(const std::string& a);

// Default tolerance for grid checks: c_dx * dx + c_quad * du.  Both
// constants are overridable from the run config.
struct TolerancePolicy {
  double c_dx = 5.0;
  double c_quad = 5.0;
  double operator()(double dx, double du = 0.0) const {
    return c_dx * dx + c_quad * du;
  }
};

}  // namespace cdlab
