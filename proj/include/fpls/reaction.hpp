#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fpls/grid.hpp"

namespace fpls {

/// Constants describing a reaction term f(x, t): growth, sublinearity near the
/// origin, zeros, quasi-monotonicity shift, and the declared asymptotic slope
/// band. `p` is the exponent the growth statements refer to.
struct ReactionParams {
  double p = 2.0;
  double c0 = 0.0;       // growth constant: |f| <= c0 (1 + |t|^{p-1})
  double c1 = 0.0;       // sublinearity constant near the origin
  double c2 = 0.0;       // shift making t -> f + c2 |t|^{p-2} t nondecreasing
  double q = 1.5;        // sublinear exponent, q in (1, p)
  double delta0 = 0.0;   // radius where the sublinear bound holds
  double a_minus = 0.0;  // negative zero of f
  double a_plus = 0.0;   // positive zero of f
  double mu = 0.0;       // reverse Ambrosetti-Rabinowitz exponent in (1, p)
  double eta1 = 0.0;     // lower asymptotic slope of f / |t|^{p-2} t
  double eta2 = 0.0;     // upper asymptotic slope
  double eps_inf = 0.0;  // declared slack for the asymptotic slope check
  double t_asym = 50.0;  // |t| from which the slope band is audited
};

/// Evaluator pair (f, F) with F(x, 0) = 0. The node index carries the spatial
/// dependence for node-indexed truncations; autonomous reactions ignore it.
/// Immutable after construction, evaluators are pure.
class Reaction {
public:
  using Evaluator = std::function<double(std::size_t node, double t)>;

  Reaction() = default;
  Reaction(Evaluator f, Evaluator primitive, ReactionParams params, bool autonomous = true)
      : f_(std::move(f)), F_(std::move(primitive)), params_(params), autonomous_(autonomous) {}

  double f(std::size_t node, double t) const { return f_(node, t); }
  double F(std::size_t node, double t) const { return F_(node, t); }
  double f(double t) const { return f_(0, t); }
  double F(double t) const { return F_(0, t); }

  const ReactionParams& params() const { return params_; }
  ReactionParams& params() { return params_; }
  bool autonomous() const { return autonomous_; }

private:
  Evaluator f_;
  Evaluator F_;
  ReactionParams params_;
  bool autonomous_ = true;
};

/// Truncation bounds may be constants or nodal profiles.
using Bound = std::variant<double, GridFunction>;
double bound_at(const Bound& b, std::size_t node);

/// Autonomous model reaction: for t >= 0,
///   f(t) = (eta t^p - gamma t^{p-1} + sqrt(t)) / (t + 1),
/// extended oddly to t < 0. At p = 2 this is the classical two-well profile
/// with slope eta at infinity, square-root growth at the origin (q = 3/2), a
/// sign change before t = 1 (since f(1) = (eta - gamma + 1)/2 < 0), and a
/// derivative bounded below. The primitive is computed by adaptive quadrature
/// with cached checkpoints (tolerance 1e-12, under the substitution t = z^2).
///
/// All derived constants (a_plus by bisection, delta0 by scan with c1 = 1/2,
/// c2 from sampled difference quotients, eta1 = eta2 = eta, mu = 7/4) are
/// filled in. Requires gamma > eta + 1 (Errc::parameter_constraint) and
/// p >= 2 (Errc::invalid_order).
Reaction example_reaction(double eta, double gamma, double p = 2.0);

/// Monotone-cubic interpolant of tabulated (t, f) pairs, extended linearly
/// beyond the table with the end slopes; the primitive integrates the cubic
/// pieces exactly and is anchored at F(0) = 0. The table must straddle t = 0.
/// Missing parameters (a_plus, a_minus, delta0, c2, c0) are derived by
/// root-finding and scans where possible.
Reaction tabulated_reaction(const std::vector<std::pair<double, double>>& points,
                            ReactionParams params);

/// Bisection root of f in (0, t_hi); requires f > 0 somewhere near 0+ and
/// f(t_hi) < 0, else Errc::no_sign_change. The result satisfies |f| < 1e-12.
double find_positive_root(const Reaction& r, double t_hi, std::size_t node = 0);
/// Mirror routine on (t_lo, 0).
double find_negative_root(const Reaction& r, double t_lo, std::size_t node = 0);

/// f frozen at f(x, lower) below `lower` and f(x, upper) above `upper`; the
/// primitive is rebuilt so it stays exact and F(x, 0) = 0. Errors with
/// Errc::ordering_violated if lower > upper at some node.
Reaction truncate_interval(const Reaction& r, Bound lower, Bound upper);

/// One-sided truncation: f(x, t) = f(x, floor(x)) for t < floor(x).
Reaction truncate_below(const Reaction& r, Bound floor);

/// Zero / f / zero truncation over [0, a_plus]; both frozen values vanish
/// because f(x, 0) = f(x, a_plus) = 0.
Reaction truncate_zero_aplus(const Reaction& r);

/// Sign-split pair: first = f(x, t^+), second = f(x, -t^-).
std::pair<Reaction, Reaction> split_signs(const Reaction& r);

/// Mirror reaction t -> -f(x, -t); maps the negative semiaxis problem onto the
/// positive one. Equals r itself when f is odd.
Reaction reflect(const Reaction& r);

// --- hypothesis audit ------------------------------------------------------

struct SamplingPlan {
  std::size_t n_origin = 96;     // log-spaced samples in (t_min, delta0]
  std::size_t n_interval = 257;  // uniform samples in [a_minus, a_plus]
  std::size_t n_far = 96;        // log-spaced samples in [t_asym, t_max]
  double t_min = 1e-9;
  double t_max = 1e3;
  double slack = 1e-10;
  std::vector<std::size_t> nodes = {0};  // node indices to audit
};

struct AuditWitness {
  std::size_t node = 0;
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct AuditCheck {
  std::string name;
  bool passed = true;
  std::size_t violations = 0;
  std::optional<AuditWitness> witness;  // first violation, if any
};

/// Sampling verdicts are "no violation found on this plan", never proofs.
struct AuditReport {
  AuditCheck growth;          // |f| <= c0 (1 + |t|^{p-1})
  AuditCheck asymptotic;      // f/|t|^{p-2}t within [eta1 - eps, eta2 + eps] far out
  AuditCheck sublinear;       // f >= c1 t^{q-1} near 0+ (and mirrored)
  AuditCheck zeros;           // f vanishes at a_minus, 0, a_plus; min(a+,-a-) > delta0
  AuditCheck quasi_monotone;  // f + c2 |t|^{p-2} t nondecreasing on [a-, a+]
  AuditCheck reverse_ar;      // mu F >= f t for |t| <= delta0
  double lambda1 = 0.0;
  double eta1_margin = 0.0;  // eta1 - lambda1, recorded for non-resonance review
  double largest_t_checked = 0.0;

  bool all_passed() const;
  std::vector<const AuditCheck*> checks() const;
};

/// Samples every hypothesis inequality with the plan's slack. lambda1 is the
/// first eigenvalue on the target grid; it enters the report as the
/// non-resonance margin eta1 - lambda1 but does not flip any verdict.
AuditReport audit_hypotheses(const Reaction& r, double lambda1, const SamplingPlan& plan);

}  // namespace fpls
