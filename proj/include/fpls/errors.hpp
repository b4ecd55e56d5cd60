#pragma once

#include <stdexcept>
#include <string>

namespace fpls {

/// Error taxonomy shared by the whole library. The CLI maps categories to
/// process exit codes, so solver code should pick the closest code rather
/// than throwing bare std::runtime_error.
enum class Errc {
  invalid_config,        // bad run configuration / CLI input
  invalid_order,         // p < 2, s outside (0,1), or p*s >= 1
  invalid_domain,        // a >= b or too few cells
  grid_mismatch,         // grid function size does not match grid
  parameter_constraint,  // reaction parameter constraint violated
  no_sign_change,        // root bracket invalid
  invalid_weight,        // eigenproblem weight not admissible
  non_convergence,       // iteration budget exhausted
  energy_nan,            // evaluator produced a non-finite value
  no_barrier,            // mountain pass precondition failed
  path_collapse,         // path maximum fell into an endpoint basin
  ordering_violated,     // monotone iteration lost ordering (c2 too small)
  inner_solve_failure,   // inner convex solve failed
  barrier_failure,       // monotone limit escaped the supersolution
  triviality,            // solver returned the zero function
  non_nodal,             // nodal stage produced a constant-sign function
  audit_failed,          // hypothesis audit rejected the reaction
  io_error,              // file system failure
};

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace fpls
