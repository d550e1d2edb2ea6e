#include "infinitum/flow.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "infinitum/errors.hpp"
#include "infinitum/poly_analysis.hpp"
#include "infinitum/pwl.hpp"

namespace infinitum {

void IntegratorConfig::validate() const {
  if (!(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max)) {
    fail(ErrorCode::InvalidField, "integrator needs 0 < dt_min <= dt_init <= dt_max");
  }
  if (!(rel_tol > 0.0 && abs_tol > 0.0)) fail(ErrorCode::InvalidField, "integrator tolerances must be positive");
  if (renormalize_every < 1) fail(ErrorCode::InvalidField, "renormalize_every must be >= 1");
  if (!std::isfinite(t_end)) fail(ErrorCode::NonFiniteInput, "t_end");
}

std::string to_string(Terminal t) {
  switch (t) {
    case Terminal::TimeExhausted: return "TimeExhausted";
    case Terminal::EquatorContact: return "EquatorContact";
    case Terminal::StepFailure: return "StepFailure";
  }
  return "?";
}

namespace {

using Rhs = std::function<Vector(const Vector&)>;
using EventFn = std::function<double(const Vector&)>;

struct System {
  Rhs rhs;
  bool valid_on_equator = false;
  std::optional<EquatorEvaluator> equator;
  std::vector<EventFn> events;
};

Vector pinned(Vector z) {
  const auto n = z.size() - 1;
  z[n] = 0.0;
  const double r = z.norm();
  if (r > 0.0) z /= r;
  return z;
}

struct Step {
  Vector y;
  Vector err;
  bool ok = true;
};

// Dormand-Prince 5(4) step; stages see y / ||y||.
Step dopri(const Rhs& f, const Vector& y, double h) {
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                          a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                          a65 = -5103.0 / 18656.0;
  static constexpr std::array<double, 7> b5 = {35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0,
                                               -2187.0 / 6784.0, 11.0 / 84.0, 0.0};
  static constexpr std::array<double, 7> b4 = {5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0,
                                               -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0};
  auto eval = [&](const Vector& x) { return f(x / x.norm()); };
  Step s;
  try {
    const Vector k1 = eval(y);
    const Vector k2 = eval(y + h * (a21 * k1));
    const Vector k3 = eval(y + h * (a31 * k1 + a32 * k2));
    const Vector k4 = eval(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vector k5 = eval(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vector k6 = eval(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    s.y = y + h * (b5[0] * k1 + b5[2] * k3 + b5[3] * k4 + b5[4] * k5 + b5[5] * k6);
    const Vector k7 = eval(s.y);
    s.err = h * ((b5[0] - b4[0]) * k1 + (b5[2] - b4[2]) * k3 + (b5[3] - b4[3]) * k4 + (b5[4] - b4[4]) * k5 +
                 (b5[5] - b4[5]) * k6 - b4[6] * k7);
    s.ok = s.y.allFinite() && s.err.allFinite();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EquatorPoint) throw;
    s.ok = false;
  }
  return s;
}

double error_norm(const Step& s, const Vector& y, const IntegratorConfig& cfg) {
  if (!s.ok) return std::numeric_limits<double>::infinity();
  double e = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(s.y[i]));
    e = std::max(e, std::abs(s.err[i]) / sc);
  }
  return e;
}

Trajectory run(const System& sys, Vector y, bool pin, const IntegratorConfig& cfg) {
  cfg.validate();
  Trajectory traj;
  traj.equator_handoff = pin;
  const double dir = cfg.t_end >= 0.0 ? 1.0 : -1.0;
  const auto last = y.size() - 1;

  auto pinned_rhs = [&](const Vector& z) -> Vector {
    const Vector p = pinned(z);
    Vector v = sys.equator ? (*sys.equator)(EquatorPoint{p}) : sys.rhs(p);
    v[last] = 0.0;
    return v;
  };
  const Rhs free_rhs = sys.rhs;
  const Rhs pin_rhs = pinned_rhs;

  double t = 0.0;
  double h = dir * cfg.dt_init;
  long steps = 0;
  traj.samples.push_back({t, y});
  while (dir * (cfg.t_end - t) > 1e-14 * std::max(1.0, std::abs(cfg.t_end))) {
    if (++steps > cfg.max_steps) {
      traj.terminal = Terminal::StepFailure;
      traj.message = "step budget exhausted";
      return traj;
    }
    const bool clamped = std::abs(h) > std::abs(cfg.t_end - t);
    const double h_try = clamped ? cfg.t_end - t : h;
    const Rhs& f = pin ? pin_rhs : free_rhs;
    const Step s = dopri(f, y, h_try);
    const double err = error_norm(s, y, cfg);
    if (!(err <= 1.0)) {
      const double shrink = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25;
      h = h_try * shrink;
      if (std::abs(h) < cfg.dt_min) {
        traj.terminal = Terminal::StepFailure;
        traj.message = "dt_min reached without meeting the tolerance";
        return traj;
      }
      continue;
    }

    Vector y_new = s.y;
    double t_new = t + h_try;
    if (steps % cfg.renormalize_every == 0) y_new /= y_new.norm();
    if (pin) y_new = pinned(y_new);

    if (!pin && !sys.events.empty()) {
      // Earliest switching-surface crossing inside the step.
      double theta_best = 2.0;
      for (const auto& ev : sys.events) {
        const double e0 = ev(y);
        const double e1 = ev(y_new);
        if (!(e0 * e1 < 0.0)) continue;
        double lo = 0.0;
        double hi = 1.0;
        while ((hi - lo) * std::abs(h_try) > 1e-12) {
          const double mid = 0.5 * (lo + hi);
          const Step part = dopri(f, y, mid * h_try);
          if (!part.ok) break;
          if ((ev(part.y / part.y.norm()) < 0.0) == (e0 < 0.0)) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        theta_best = std::min(theta_best, hi);
      }
      if (theta_best < 1.0) {
        const Step part = dopri(f, y, theta_best * h_try);
        if (part.ok) {
          y_new = part.y / part.y.norm();
          t_new = t + theta_best * h_try;
          ++traj.events;
        }
      }
    }

    if (!pin && y_new[last] < 1e-12) {
      if (!sys.valid_on_equator) {
        traj.terminal = Terminal::EquatorContact;
        traj.message = "orbit reached the equator and the field has no closed-form extension there";
        return traj;
      }
      pin = true;
      traj.equator_handoff = true;
      y_new = pinned(y_new);
    }

    t = t_new;
    y = std::move(y_new);
    traj.samples.push_back({t, y});

    const double grow = err == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
    if (!clamped) h = h_try * grow;
    if (std::abs(h) > cfg.dt_max) h = dir * cfg.dt_max;
    if (std::abs(h) < cfg.dt_min) h = dir * cfg.dt_min;
  }
  traj.terminal = Terminal::TimeExhausted;
  return traj;
}

std::optional<LureForm> as_lure(const VectorField& field) {
  if (const auto* l = std::get_if<LureForm>(&field)) return *l;
  if (const auto* r = std::get_if<PwlRegionField>(&field)) return lure_extract(*r);
  return std::nullopt;
}

EquatorEvaluator conjugated_pwl_equator(const LureForm& lure) {
  const NormalizedLure nl = lure_normalize(lure);
  return [nl](const EquatorPoint& ze) -> Vector {
    const auto n = ze.coords.size() - 1;
    Vector w = Vector::Zero(n + 1);
    w.head(n) = nl.M.transpose() * ze.pi();
    const Vector v = pwl_equator_field(nl.form, EquatorPoint{w});
    Vector out = Vector::Zero(n + 1);
    out.head(n) = nl.M * v.head(n);
    return out;
  };
}

bool integer_exponent(const Regularizer& rho, int at_least) {
  return rho.kind() == Regularizer::Kind::Power && std::floor(rho.exponent()) == rho.exponent() &&
         rho.exponent() >= at_least;
}

}  // namespace

std::optional<EquatorEvaluator> closed_form_equator(const VectorField& field, const Regularizer& rho) {
  if (const auto* p = std::get_if<PolynomialField>(&field)) {
    if (rho.kind() == Regularizer::Kind::Power && rho.exponent() == p->degree() - 1) {
      return [f = *p](const EquatorPoint& ze) { return equator_field_poly(f, ze); };
    }
    return std::nullopt;
  }
  if (const auto* h = std::get_if<HomogeneousSumField>(&field)) {
    if (rho.kind() == Regularizer::Kind::Power && rho.exponent() == h->degree() - 1) {
      return [f = *h](const EquatorPoint& ze) { return equator_field_homogeneous(f, ze); };
    }
    return std::nullopt;
  }
  if (rho.kind() == Regularizer::Kind::One) {
    if (auto lure = as_lure(field)) return conjugated_pwl_equator(*lure);
  }
  return std::nullopt;
}

std::optional<EquatorEvaluator> equator_evaluator(const VectorField& field, const Regularizer& rho) {
  if (auto closed = closed_form_equator(field, rho)) return closed;
  if (const auto* fx = std::get_if<NamedFixture>(&field)) {
    const int degree = fx->default_degree();
    if (fx->tag != FixtureTag::ExoticSphereG && rho.kind() == Regularizer::Kind::Power &&
        rho.exponent() == degree - 1) {
      return [field, degree](const EquatorPoint& ze) { return equator_field_growth(field, degree, ze); };
    }
  }
  return std::nullopt;
}

Trajectory integrate(const VectorField& field, const Regularizer& rho, const SpherePoint& z0,
                     const IntegratorConfig& cfg) {
  if (z0.n() != dimension(field)) fail(ErrorCode::DimensionMismatch, "integrate: initial point");
  const SpherePoint start = SpherePoint::checked(z0.coords);
  System sys;

  const bool polynomial_like =
      std::holds_alternative<PolynomialField>(field) || std::holds_alternative<HomogeneousSumField>(field);
  const int degree = polynomial_like ? std::visit(
                                           [](const auto& f) -> int {
                                             using T = std::decay_t<decltype(f)>;
                                             if constexpr (std::is_same_v<T, PolynomialField> ||
                                                           std::is_same_v<T, HomogeneousSumField>) {
                                               return f.degree();
                                             } else {
                                               return 0;
                                             }
                                           },
                                           field)
                                     : 0;
  std::optional<LureForm> lure;
  if (rho.kind() == Regularizer::Kind::One) lure = as_lure(field);

  if (polynomial_like && integer_exponent(rho, degree - 1)) {
    const int s = static_cast<int>(rho.exponent());
    sys.rhs = [&field, s](const Vector& z) { return homogenized_field(field, s, z); };
    sys.valid_on_equator = true;
  } else if (lure) {
    const NormalizedLure nl = lure_normalize(*lure);
    sys.rhs = [nl](const Vector& z) -> Vector {
      const auto n = z.size() - 1;
      Vector w(n + 1);
      w.head(n) = nl.M.transpose() * z.head(n);
      w[n] = z[n];
      const Vector v = pwl_compactified(nl.form, SpherePoint{w});
      Vector out(n + 1);
      out.head(n) = nl.M * v.head(n);
      out[n] = v[n];
      return out;
    };
    sys.valid_on_equator = true;
    for (double tau : lure->breaks) {
      const Vector k = lure->k;
      sys.events.push_back([k, tau](const Vector& z) {
        const auto n = z.size() - 1;
        return k.dot(z.head(n)) - tau * z[n];
      });
    }
  } else {
    sys.rhs = [&field, &rho](const Vector& z) { return regularized_field(field, rho, SpherePoint{z}); };
  }
  if (sys.valid_on_equator) sys.equator = closed_form_equator(field, rho);

  const bool on_equator = start.height() == 0.0;
  if (on_equator && !sys.valid_on_equator) {
    Trajectory t;
    t.samples.push_back({0.0, start.coords});
    t.terminal = Terminal::EquatorContact;
    t.message = "initial point lies on the equator and the field has no closed-form extension there";
    return t;
  }
  return run(sys, start.coords, on_equator, cfg);
}

Trajectory equator_orbit(const EquatorEvaluator& evaluator, const EquatorPoint& z0, const IntegratorConfig& cfg) {
  const EquatorPoint start = EquatorPoint::checked(z0.coords);
  System sys;
  sys.rhs = [&evaluator](const Vector& z) { return evaluator(EquatorPoint{pinned(z)}); };
  sys.valid_on_equator = true;
  sys.equator = evaluator;
  return run(sys, start.coords, true, cfg);
}

}  // namespace infinitum
