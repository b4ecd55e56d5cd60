#include "fpls/reaction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "fpls/errors.hpp"
#include "fpls/quadrature.hpp"

namespace fpls {

double bound_at(const Bound& b, std::size_t node) {
  if (std::holds_alternative<double>(b)) return std::get<double>(b);
  return std::get<GridFunction>(b).at(node);
}

namespace {

std::vector<double> log_space(double lo, double hi, std::size_t n) {
  std::vector<double> out;
  if (!(lo > 0.0) || !(hi > lo) || n == 0) return out;
  out.reserve(n);
  const double ratio = std::log(hi / lo);
  for (std::size_t k = 0; k < n; ++k)
    out.push_back(lo * std::exp(ratio * static_cast<double>(k) / static_cast<double>(n - 1)));
  out.back() = hi;
  return out;
}

std::vector<double> lin_space(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k)
    out[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  return out;
}

inline double phi_p(double t, double p) {  // |t|^{p-2} t
  if (p == 2.0) return t;
  if (t == 0.0) return 0.0;
  return std::pow(std::abs(t), p - 2.0) * t;
}

// --- model reaction ---------------------------------------------------------

// Positive-semiaxis formula; the odd extension is applied by the evaluator.
double example_f_pos(double t, double eta, double gamma, double p) {
  if (t == 0.0) return 0.0;
  double tp, tpm1;
  if (p == 2.0) {
    tp = t * t;
    tpm1 = t;
  } else if (p == 3.0) {
    tpm1 = t * t;
    tp = tpm1 * t;
  } else {
    tp = std::pow(t, p);
    tpm1 = std::pow(t, p - 1.0);
  }
  return (eta * tp - gamma * tpm1 + std::sqrt(t)) / (t + 1.0);
}

// Under t = z^2 the primitive integrand 2 z f(z^2) loses the square-root
// singularity and becomes a smooth rational function of z.
struct ExampleTable {
  double eta, gamma, p;
  double dz;
  std::vector<double> cum;  // integral of 2 z f(z^2) from 0 to k*dz

  double integrand(double z) const {
    double z2p, z2pm2;
    const double zz = z * z;
    if (p == 2.0) {
      z2pm2 = zz;
      z2p = zz * zz;
    } else if (p == 3.0) {
      z2pm2 = zz * zz;
      z2p = z2pm2 * zz;
    } else {
      z2p = std::pow(z, 2.0 * p);
      z2pm2 = std::pow(z, 2.0 * p - 2.0);
    }
    return 2.0 * z * (eta * z2p - gamma * z2pm2 + z) / (zz + 1.0);
  }

  void build(double z_max, double spacing) {
    dz = spacing;
    const std::size_t cells = static_cast<std::size_t>(std::ceil(z_max / dz));
    cum.assign(cells + 1, 0.0);
    auto g = [this](double z) { return integrand(z); };
    for (std::size_t k = 0; k < cells; ++k)
      cum[k + 1] = cum[k] + adaptive_quad(g, k * dz, (k + 1) * dz, 1e-14);
  }

  // F(|t|); the primitive of the odd extension is even.
  double primitive(double t) const {
    const double z = std::sqrt(std::abs(t));
    auto g = [this](double z_) { return integrand(z_); };
    const double z_top = dz * static_cast<double>(cum.size() - 1);
    if (z <= z_top) {
      std::size_t k = std::min(static_cast<std::size_t>(z / dz), cum.size() - 2);
      return cum[k] + gauss15(g, static_cast<double>(k) * dz, z);
    }
    return cum.back() + adaptive_quad(g, z_top, z, 1e-12);
  }
};

// --- derived constants ------------------------------------------------------

// Largest delta <= a_plus/2 with f >= c1 t^{q-1} throughout (0, delta].
double scan_delta0(const Reaction& r, double c1, double q, double a_plus) {
  const double hi = 0.5 * a_plus;
  const auto ts = log_space(1e-12 * a_plus, hi, 2000);
  auto margin = [&](double t) { return r.f(t) - c1 * std::pow(t, q - 1.0); };
  double prev = ts.front();
  if (margin(prev) <= 0.0) return prev;
  for (std::size_t k = 1; k < ts.size(); ++k) {
    if (margin(ts[k]) <= 0.0) {
      double lo = prev, hi2 = ts[k];
      for (int it = 0; it < 200 && hi2 - lo > 1e-15 * hi2; ++it) {
        const double mid = 0.5 * (lo + hi2);
        (margin(mid) > 0.0 ? lo : hi2) = mid;
      }
      return lo * (1.0 - 1e-6);
    }
    prev = ts[k];
  }
  return hi;
}

// Smallest shift making t -> f + c2 |t|^{p-2} t nondecreasing on [a-, a+],
// estimated from sampled difference quotients of f against those of the shift
// term, plus one. At p = 2 the shift quotient is identically one and this is
// 1 + max(0, -inf f').
double estimate_c2(const Reaction& r, double p, double a_minus, double a_plus) {
  const auto ts = lin_space(a_minus, a_plus, 2001);
  double need = 0.0;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    const double df = (r.f(ts[k + 1]) - r.f(ts[k])) / (ts[k + 1] - ts[k]);
    if (df >= 0.0) continue;
    const double dphi =
        (phi_p(ts[k + 1], p) - phi_p(ts[k], p)) / (ts[k + 1] - ts[k]);
    if (dphi > 0.0) need = std::max(need, -df / dphi);
  }
  return std::min(1.0 + need, 1e6);
}

double estimate_c0(const Reaction& r, double p, double t_max) {
  double c0 = 0.0;
  for (double t : log_space(1e-8, t_max, 400)) {
    c0 = std::max(c0, std::abs(r.f(t)) / (1.0 + std::pow(t, p - 1.0)));
    c0 = std::max(c0, std::abs(r.f(-t)) / (1.0 + std::pow(t, p - 1.0)));
  }
  return 1.05 * c0;
}

}  // namespace

Reaction example_reaction(double eta, double gamma, double p) {
  if (!(p >= 2.0)) fail(Errc::invalid_order, "example_reaction: requires p >= 2");
  if (!(gamma > eta + 1.0))
    fail(Errc::parameter_constraint, "example_reaction: requires gamma > eta + 1");

  auto table = std::make_shared<ExampleTable>();
  table->eta = eta;
  table->gamma = gamma;
  table->p = p;
  table->build(/*z_max=*/32.0, /*spacing=*/1.0 / 64.0);

  auto f = [eta, gamma, p](std::size_t, double t) {
    return t >= 0.0 ? example_f_pos(t, eta, gamma, p) : -example_f_pos(-t, eta, gamma, p);
  };
  auto F = [table](std::size_t, double t) { return table->primitive(t); };

  ReactionParams prm;
  prm.p = p;
  prm.q = 1.5;
  prm.mu = 1.75;
  prm.eta1 = eta;
  prm.eta2 = eta;
  prm.c0 = eta + gamma + 1.0;
  prm.c1 = 0.5;
  prm.t_asym = 50.0;
  prm.eps_inf = 1.1 * (gamma + eta + 1.0) / (prm.t_asym + 1.0);

  Reaction r(f, F, prm, /*autonomous=*/true);
  r.params().a_plus = find_positive_root(r, 1.0);
  r.params().a_minus = -r.params().a_plus;  // odd extension
  r.params().delta0 = scan_delta0(r, prm.c1, prm.q, r.params().a_plus);
  r.params().c2 = estimate_c2(r, p, r.params().a_minus, r.params().a_plus);
  return r;
}

double find_positive_root(const Reaction& r, double t_hi, std::size_t node) {
  if (!(t_hi > 0.0) || !(r.f(node, t_hi) < 0.0))
    fail(Errc::no_sign_change, "find_positive_root: f(t_hi) must be negative");
  double lo = 0.0;
  for (int k = 1; k <= 90; ++k) {
    const double t = t_hi * std::ldexp(1.0, -k);
    if (r.f(node, t) > 0.0) {
      lo = t;
      break;
    }
  }
  if (lo == 0.0) fail(Errc::no_sign_change, "find_positive_root: no positive value near 0+");
  double hi = t_hi;
  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi;
       ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = r.f(node, mid);
    if (fm > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double root = std::abs(r.f(node, lo)) < std::abs(r.f(node, hi)) ? lo : hi;
  if (!(std::abs(r.f(node, root)) < 1e-12))
    fail(Errc::non_convergence, "find_positive_root: bisection did not reach |f| < 1e-12");
  return root;
}

double find_negative_root(const Reaction& r, double t_lo, std::size_t node) {
  if (!(t_lo < 0.0)) fail(Errc::no_sign_change, "find_negative_root: need t_lo < 0");
  return -find_positive_root(reflect(r), -t_lo, node);
}

Reaction truncate_interval(const Reaction& r, Bound lower, Bound upper) {
  if (std::holds_alternative<GridFunction>(lower) && std::holds_alternative<GridFunction>(upper) &&
      std::get<GridFunction>(lower).size() != std::get<GridFunction>(upper).size())
    fail(Errc::grid_mismatch, "truncate_interval: bound sizes differ");
  const std::size_t probe = std::max(
      std::holds_alternative<GridFunction>(lower) ? std::get<GridFunction>(lower).size() : 1ul,
      std::holds_alternative<GridFunction>(upper) ? std::get<GridFunction>(upper).size() : 1ul);
  for (std::size_t i = 0; i < probe; ++i)
    if (bound_at(lower, i) > bound_at(upper, i))
      fail(Errc::ordering_violated, "truncate_interval: lower > upper at node " +
                                        std::to_string(i));

  Reaction base = r;
  auto f = [base, lower, upper](std::size_t i, double t) {
    return base.f(i, std::clamp(t, bound_at(lower, i), bound_at(upper, i)));
  };
  // Exact primitive of the clamped evaluator, anchored at zero: linear in the
  // frozen ranges, the base primitive in between.
  auto F = [base, lower, upper](std::size_t i, double t) {
    const double lo = bound_at(lower, i);
    const double up = bound_at(upper, i);
    const double ct = std::clamp(t, lo, up);
    const double c0 = std::clamp(0.0, lo, up);
    double val = base.F(i, ct) - base.F(i, c0);
    val += base.f(i, lo) * (std::min(t, lo) - std::min(0.0, lo));
    val += base.f(i, up) * (std::max(t, up) - std::max(0.0, up));
    return val;
  };
  const bool autonomous = base.autonomous() && std::holds_alternative<double>(lower) &&
                          std::holds_alternative<double>(upper);
  return Reaction(f, F, base.params(), autonomous);
}

Reaction truncate_below(const Reaction& r, Bound floor) {
  Reaction base = r;
  auto f = [base, floor](std::size_t i, double t) {
    return base.f(i, std::max(t, bound_at(floor, i)));
  };
  auto F = [base, floor](std::size_t i, double t) {
    const double lo = bound_at(floor, i);
    double val = base.F(i, std::max(t, lo)) - base.F(i, std::max(0.0, lo));
    val += base.f(i, lo) * (std::min(t, lo) - std::min(0.0, lo));
    return val;
  };
  const bool autonomous = base.autonomous() && std::holds_alternative<double>(floor);
  return Reaction(f, F, base.params(), autonomous);
}

Reaction truncate_zero_aplus(const Reaction& r) {
  const double ap = r.params().a_plus;
  if (!(ap > 0.0))
    fail(Errc::parameter_constraint, "truncate_zero_aplus: a_plus is not set");
  // f(x,0) = f(x,a_plus) = 0, so clamping to [0, a_plus] freezes both outer
  // branches at zero, which is exactly the 0 / f / 0 truncation.
  return truncate_interval(r, 0.0, ap);
}

std::pair<Reaction, Reaction> split_signs(const Reaction& r) {
  Reaction base = r;
  auto f_plus = [base](std::size_t i, double t) { return base.f(i, std::max(t, 0.0)); };
  auto F_plus = [base](std::size_t i, double t) { return base.F(i, std::max(t, 0.0)); };
  auto f_minus = [base](std::size_t i, double t) { return base.f(i, std::min(t, 0.0)); };
  auto F_minus = [base](std::size_t i, double t) { return base.F(i, std::min(t, 0.0)); };
  return {Reaction(f_plus, F_plus, base.params(), base.autonomous()),
          Reaction(f_minus, F_minus, base.params(), base.autonomous())};
}

Reaction reflect(const Reaction& r) {
  Reaction base = r;
  auto f = [base](std::size_t i, double t) { return -base.f(i, -t); };
  auto F = [base](std::size_t i, double t) { return base.F(i, -t); };
  ReactionParams prm = base.params();
  prm.a_plus = -base.params().a_minus;
  prm.a_minus = -base.params().a_plus;
  return Reaction(f, F, prm, base.autonomous());
}

// --- tabulated reactions ----------------------------------------------------

namespace {

// Monotone cubic (Fritsch-Carlson) interpolant with linear extension beyond
// the table and exact piecewise integration of the Hermite cells.
struct Pchip {
  std::vector<double> t, y, m, cum;

  void build(std::vector<std::pair<double, double>> pts) {
    std::sort(pts.begin(), pts.end());
    const std::size_t n = pts.size();
    t.resize(n);
    y.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      t[k] = pts[k].first;
      y[k] = pts[k].second;
      if (k > 0 && !(t[k] > t[k - 1]))
        fail(Errc::invalid_config, "tabulated_reaction: duplicate abscissa");
    }
    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      h[k] = t[k + 1] - t[k];
      d[k] = (y[k + 1] - y[k]) / h[k];
    }
    m.assign(n, 0.0);
    if (n == 2) {
      m[0] = m[1] = d[0];
    } else {
      for (std::size_t k = 1; k + 1 < n; ++k) {
        if (d[k - 1] * d[k] <= 0.0) {
          m[k] = 0.0;
        } else {
          const double w1 = 2.0 * h[k] + h[k - 1];
          const double w2 = h[k] + 2.0 * h[k - 1];
          m[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
        }
      }
      m[0] = end_slope(h[0], h[1], d[0], d[1]);
      m[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    }
    cum.assign(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k)
      cum[k + 1] = cum[k] + 0.5 * h[k] * (y[k] + y[k + 1]) +
                   h[k] * h[k] * (m[k] - m[k + 1]) / 12.0;
  }

  static double end_slope(double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (s * d0 <= 0.0) return 0.0;
    if (d0 * d1 < 0.0 && std::abs(s) > 3.0 * std::abs(d0)) return 3.0 * d0;
    return s;
  }

  std::size_t cell(double x) const {
    const auto it = std::upper_bound(t.begin(), t.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - t.begin());
    return std::min(std::max<std::size_t>(k, 1) - 1, t.size() - 2);
  }

  double eval(double x) const {
    if (x <= t.front()) return y.front() + m.front() * (x - t.front());
    if (x >= t.back()) return y.back() + m.back() * (x - t.back());
    const std::size_t k = cell(x);
    const double h = t[k + 1] - t[k];
    const double xi = (x - t[k]) / h;
    const double xi2 = xi * xi, xi3 = xi2 * xi;
    return y[k] * (2.0 * xi3 - 3.0 * xi2 + 1.0) + h * m[k] * (xi3 - 2.0 * xi2 + xi) +
           y[k + 1] * (-2.0 * xi3 + 3.0 * xi2) + h * m[k + 1] * (xi3 - xi2);
  }

  // Integral from t.front() to x (signed; quadratic beyond the table).
  double cum_at(double x) const {
    if (x <= t.front()) {
      const double dx = x - t.front();
      return y.front() * dx + 0.5 * m.front() * dx * dx;
    }
    if (x >= t.back()) {
      const double dx = x - t.back();
      return cum.back() + y.back() * dx + 0.5 * m.back() * dx * dx;
    }
    const std::size_t k = cell(x);
    const double h = t[k + 1] - t[k];
    const double xi = (x - t[k]) / h;
    const double xi2 = xi * xi, xi3 = xi2 * xi, xi4 = xi3 * xi;
    const double i00 = 0.5 * xi4 - xi3 + xi;
    const double i10 = 0.25 * xi4 - 2.0 * xi3 / 3.0 + 0.5 * xi2;
    const double i01 = -0.5 * xi4 + xi3;
    const double i11 = 0.25 * xi4 - xi3 / 3.0;
    return cum[k] +
           h * (y[k] * i00 + h * m[k] * i10 + y[k + 1] * i01 + h * m[k + 1] * i11);
  }
};

}  // namespace

Reaction tabulated_reaction(const std::vector<std::pair<double, double>>& points,
                            ReactionParams params) {
  if (points.size() < 2) fail(Errc::invalid_config, "tabulated_reaction: need >= 2 points");
  auto interp = std::make_shared<Pchip>();
  interp->build(points);
  if (!(interp->t.front() <= 0.0 && interp->t.back() >= 0.0))
    fail(Errc::parameter_constraint, "tabulated_reaction: table must straddle t = 0");

  const double anchor = interp->cum_at(0.0);
  auto f = [interp](std::size_t, double t) { return interp->eval(t); };
  auto F = [interp, anchor](std::size_t, double t) { return interp->cum_at(t) - anchor; };

  Reaction r(f, F, params, /*autonomous=*/true);
  ReactionParams& prm = r.params();
  if (prm.q <= 1.0 || prm.q >= prm.p) prm.q = 1.5;
  if (prm.mu <= 1.0 || prm.mu >= prm.p) prm.mu = 0.5 * (1.0 + prm.p);
  const double span = std::max(std::abs(interp->t.front()), std::abs(interp->t.back()));
  if (prm.c0 <= 0.0) prm.c0 = estimate_c0(r, prm.p, std::max(1e3, 10.0 * span));
  // Zeros of f: bisect toward the first sign change away from the origin
  // (the interpolant may turn positive again further out).
  if (prm.a_plus <= 0.0) {
    bool seen_positive = false;
    for (double t : lin_space(0.0, interp->t.back(), 2000)) {
      if (t <= 0.0) continue;
      const double v = r.f(0, t);
      if (v > 0.0) seen_positive = true;
      if (seen_positive && v < 0.0) {
        prm.a_plus = find_positive_root(r, t);
        break;
      }
    }
  }
  if (prm.a_minus >= 0.0) {
    bool seen_negative = false;
    for (double t : lin_space(0.0, interp->t.front(), 2000)) {
      if (t >= 0.0) continue;
      const double v = r.f(0, t);
      if (v < 0.0) seen_negative = true;
      if (seen_negative && v > 0.0) {
        prm.a_minus = find_negative_root(r, t);
        break;
      }
    }
  }
  if (prm.c1 <= 0.0) prm.c1 = 0.5;
  if (prm.delta0 <= 0.0 && prm.a_plus > 0.0)
    prm.delta0 = scan_delta0(r, prm.c1, prm.q, prm.a_plus);
  if (prm.c2 <= 0.0 && prm.a_plus > prm.a_minus && prm.a_plus > 0.0)
    prm.c2 = estimate_c2(r, prm.p, prm.a_minus, prm.a_plus);
  return r;
}

// --- hypothesis audit -------------------------------------------------------

namespace {

void record(AuditCheck& check, std::size_t node, double t, double lhs, double rhs) {
  check.passed = false;
  ++check.violations;
  if (!check.witness) check.witness = AuditWitness{node, t, lhs, rhs};
}

}  // namespace

bool AuditReport::all_passed() const {
  for (const AuditCheck* c : checks())
    if (!c->passed) return false;
  return true;
}

std::vector<const AuditCheck*> AuditReport::checks() const {
  return {&growth, &asymptotic, &sublinear, &zeros, &quasi_monotone, &reverse_ar};
}

AuditReport audit_hypotheses(const Reaction& r, double lambda1, const SamplingPlan& plan) {
  const ReactionParams& prm = r.params();
  AuditReport rep;
  rep.growth.name = "H1(i) growth";
  rep.asymptotic.name = "H1(ii) asymptotic slope";
  rep.sublinear.name = "H1(iii) sublinear at 0";
  rep.zeros.name = "H1(iv) zeros";
  rep.quasi_monotone.name = "H1(v) quasi-monotone";
  rep.reverse_ar.name = "H2(vi) reverse AR";
  rep.lambda1 = lambda1;
  rep.eta1_margin = prm.eta1 - lambda1;

  const double slack = plan.slack;
  const double p = prm.p;

  // The near-origin hypotheses need a genuine delta0 > 0; report the defect
  // instead of passing vacuously on an empty sample range.
  if (!(prm.delta0 > 0.0)) {
    record(rep.sublinear, 0, 0.0, prm.delta0, 0.0);
    record(rep.reverse_ar, 0, 0.0, prm.delta0, 0.0);
  }
  std::vector<double> origin =
      prm.delta0 > 0.0
          ? log_space(std::min(plan.t_min, 1e-4 * prm.delta0), prm.delta0, plan.n_origin)
          : std::vector<double>{};
  std::vector<double> interval = lin_space(prm.a_minus, prm.a_plus, plan.n_interval);
  std::vector<double> far = log_space(std::max(prm.t_asym, plan.t_min), plan.t_max, plan.n_far);

  std::vector<double> growth_ts;
  for (double t : origin) {
    growth_ts.push_back(t);
    growth_ts.push_back(-t);
  }
  for (double t : interval) growth_ts.push_back(t);
  for (double t : far) {
    growth_ts.push_back(t);
    growth_ts.push_back(-t);
  }

  for (std::size_t node : plan.nodes) {
    // H1(i): |f| <= c0 (1 + |t|^{p-1})
    for (double t : growth_ts) {
      const double lhs = std::abs(r.f(node, t));
      const double rhs = prm.c0 * (1.0 + std::pow(std::abs(t), p - 1.0));
      if (lhs > rhs + slack) record(rep.growth, node, t, lhs, rhs);
    }
    // H1(ii): declared slope band for |t| >= t_asym
    for (double t : far) {
      for (double tt : {t, -t}) {
        const double ratio = r.f(node, tt) / phi_p(tt, p);
        if (ratio < prm.eta1 - prm.eps_inf - slack)
          record(rep.asymptotic, node, tt, ratio, prm.eta1 - prm.eps_inf);
        if (ratio > prm.eta2 + prm.eps_inf + slack)
          record(rep.asymptotic, node, tt, ratio, prm.eta2 + prm.eps_inf);
      }
    }
    // H1(iii): f >= c1 t^{q-1} on (0, delta0], f <= -c1 |t|^{q-1} on [-delta0, 0)
    for (double t : origin) {
      if (t > prm.delta0) continue;
      const double bound = prm.c1 * std::pow(t, prm.q - 1.0);
      double val = r.f(node, t);
      if (val < bound - slack) record(rep.sublinear, node, t, val, bound);
      val = r.f(node, -t);
      if (val > -bound + slack) record(rep.sublinear, node, -t, val, -bound);
    }
    // H1(iv): zeros at a_minus, 0, a_plus and min(a_plus, -a_minus) > delta0
    for (double z : {prm.a_minus, 0.0, prm.a_plus}) {
      const double val = std::abs(r.f(node, z));
      if (val > slack) record(rep.zeros, node, z, val, 0.0);
    }
    if (!(std::min(prm.a_plus, -prm.a_minus) > prm.delta0))
      record(rep.zeros, node, prm.delta0, std::min(prm.a_plus, -prm.a_minus), prm.delta0);
    // H1(v): monotonicity of f + c2 |t|^{p-2} t on sampled pairs in [a-, a+]
    for (std::size_t k = 0; k + 1 < interval.size(); ++k) {
      const double lo = r.f(node, interval[k]) + prm.c2 * phi_p(interval[k], p);
      const double hi = r.f(node, interval[k + 1]) + prm.c2 * phi_p(interval[k + 1], p);
      if (hi < lo - slack) record(rep.quasi_monotone, node, interval[k + 1], hi, lo);
    }
    // H2(vi): mu F >= f t for |t| <= delta0
    for (double t : origin) {
      if (t > prm.delta0) continue;
      for (double tt : {t, -t}) {
        const double lhs = prm.mu * r.F(node, tt);
        const double rhs = r.f(node, tt) * tt;
        if (lhs < rhs - slack) record(rep.reverse_ar, node, tt, lhs, rhs);
      }
    }
  }

  rep.largest_t_checked = far.empty() ? (origin.empty() ? 0.0 : origin.back()) : far.back();
  return rep;
}

}  // namespace fpls
