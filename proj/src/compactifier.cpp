#include "infinitum/compactifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "infinitum/errors.hpp"
#include "infinitum/field_json.hpp"
#include "infinitum/parallel.hpp"

namespace infinitum {

// ---------------------------------------------------------------------------
// Regularizer

Regularizer Regularizer::power(double s) {
  if (!std::isfinite(s)) fail(ErrorCode::InvalidRegularizer, "power exponent must be finite");
  Regularizer r;
  r.kind_ = Kind::Power;
  r.s_ = s;
  return r;
}

Regularizer Regularizer::one() { return Regularizer{}; }

Regularizer Regularizer::probe(std::shared_ptr<const VectorField> field, EquatorPoint anchor, double deltabar) {
  if (!field) fail(ErrorCode::InvalidRegularizer, "probe needs a field");
  if (!(deltabar > 0.0 && deltabar <= 1.0)) fail(ErrorCode::DeltaOutOfRange, "probe deltabar must lie in (0, 1]");
  if (anchor.n() != dimension(*field)) fail(ErrorCode::DimensionMismatch, "probe anchor");
  Regularizer r;
  r.kind_ = Kind::Probe;
  r.field_ = std::move(field);
  r.anchor_ = std::move(anchor);
  r.deltabar_ = deltabar;
  return r;
}

double Regularizer::operator()(double delta) const {
  if (!(delta > 0.0 && delta <= 1.0)) fail(ErrorCode::DeltaOutOfRange, "rho is defined on (0, 1]");
  switch (kind_) {
    case Kind::Power: return std::pow(delta, s_);
    case Kind::One: return 1.0;
    case Kind::Probe: return 1.0 / meridian_G(*field_, anchor_, std::min(delta, deltabar_)).norm();
  }
  return 1.0;
}

Vector Regularizer::scale_meridian(const VectorField& field, const EquatorPoint& ze, double delta) const {
  const Vector g = meridian_G(field, ze, delta);
  if (kind_ == Kind::Probe) return g / meridian_G(*field_, anchor_, std::min(delta, deltabar_)).norm();
  return (*this)(delta) * g;
}

std::string Regularizer::describe() const {
  switch (kind_) {
    case Kind::Power: {
      std::ostringstream out;
      out.precision(17);
      out << "power:" << s_;
      return out.str();
    }
    case Kind::One: return "one";
    case Kind::Probe: return "probe";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Fields on the sphere

Vector projected_field(const VectorField& field, const SpherePoint& z) {
  if (z.n() != dimension(field)) fail(ErrorCode::DimensionMismatch, "projected_field");
  if (!(z.height() > 0.0)) fail(ErrorCode::EquatorPoint, "g is defined on the open hemisphere only");
  if (is_sphere_only(field)) {
    const auto [ze, delta] = split(z);
    return exotic_meridian(ze.coords, delta);
  }
  return jacobian(z) * eval(field, unproject(z));
}

Vector meridian_G(const VectorField& field, const EquatorPoint& ze, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) fail(ErrorCode::DeltaOutOfRange, "G(z, delta) needs 0 < delta <= 1");
  if (ze.n() != dimension(field)) fail(ErrorCode::DimensionMismatch, "meridian_G");
  if (is_sphere_only(field)) return exotic_meridian(ze.coords, delta);
  return projected_field(field, parallel_coords(ze, delta));
}

Vector regularized_field(const VectorField& field, const Regularizer& rho, const SpherePoint& z) {
  if (!(z.height() > 0.0)) fail(ErrorCode::EquatorPoint, "use equator_limit on the equator");
  if (rho.kind() == Regularizer::Kind::Probe) {
    const auto [ze, delta] = split(z);
    (void)ze;
    return projected_field(field, z) * rho(delta);
  }
  return rho(z.height()) * projected_field(field, z);
}

LimitResult equator_limit(const VectorField& field, const Regularizer& rho, const EquatorPoint& ze,
                          const std::vector<double>& schedule, const LimitOptions& options) {
  return extrapolate_limit([&](double delta) { return rho.scale_meridian(field, ze, delta); }, schedule, options);
}

LimitResult invariance_test(const VectorField& field, const Regularizer& rho, const EquatorPoint& ze,
                            const std::vector<double>& schedule, const LimitOptions& options) {
  if (is_sphere_only(field)) fail(ErrorCode::SphereOnlyField, "invariance test needs f on R^n");
  auto sampler = [&](double delta) -> Vector {
    const SpherePoint z = parallel_coords(ze, delta);
    return delta * delta * rho(delta) * eval(field, unproject(z));
  };
  LimitResult r = extrapolate_limit(sampler, schedule, options);
  if (r.value) r.value = Vector::Constant(1, r.value->norm());
  return r;
}

// ---------------------------------------------------------------------------
// Vanishing of G along a meridian

namespace {

std::optional<VanishingPoint> bisect_zero(const VectorField& field, const EquatorPoint& ze, double a, double b,
                                          const Vector& ga, const Vector& gb) {
  const Vector u = ga / ga.norm();
  double lo = a;  // s(lo) > 0
  double hi = b;  // s(hi) < 0
  Vector glo = ga;
  Vector ghi = gb;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const Vector gm = meridian_G(field, ze, mid);
    if (!gm.allFinite()) return std::nullopt;
    const double s = gm.dot(u);
    if (s == 0.0) {
      glo = gm;
      lo = mid;
      break;
    }
    if (s > 0.0) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
      ghi = gm;
    }
  }
  const bool take_lo = glo.norm() <= ghi.norm();
  const VanishingPoint p{take_lo ? lo : hi, take_lo ? glo.norm() : ghi.norm()};
  if (p.norm <= 1e-10 * std::max(ga.norm(), gb.norm())) return p;
  return std::nullopt;
}

}  // namespace

std::vector<VanishingPoint> find_vanishing(const VectorField& field, const EquatorPoint& ze,
                                           const std::vector<double>& deltas) {
  std::vector<VanishingPoint> zeros;
  Vector prev;
  double prev_delta = 0.0;
  bool have_prev = false;
  for (double d : deltas) {
    const Vector g = meridian_G(field, ze, d);
    if (!g.allFinite()) {
      have_prev = false;
      continue;
    }
    if (g.norm() == 0.0) {
      zeros.push_back({d, 0.0});
      have_prev = false;
      continue;
    }
    if (have_prev && prev.dot(g) < 0.0) {
      if (auto z = bisect_zero(field, ze, prev_delta, d, prev, g)) zeros.push_back(*z);
    }
    prev = g;
    prev_delta = d;
    have_prev = true;
  }
  return zeros;
}

namespace {

std::vector<double> probe_scan(double deltabar, const std::vector<double>& schedule) {
  std::vector<double> deltas;
  constexpr int kScan = 4096;
  for (int i = 0; i < kScan; ++i) {
    deltas.push_back(deltabar - (deltabar - deltabar / 8.0) * i / (kScan - 1));
  }
  for (double d : schedule) {
    if (d < deltabar / 8.0) deltas.push_back(d);
  }
  std::sort(deltas.begin(), deltas.end(), std::greater<>());
  deltas.erase(std::unique(deltas.begin(), deltas.end()), deltas.end());
  return deltas;
}

}  // namespace

LimitResult vanishing_sequence_limit(const VectorField& field, const EquatorPoint& ze, double deltabar, int bands,
                                     const LimitOptions& options) {
  LimitResult result;
  double worst = 0.0;
  constexpr int kScan = 512;
  for (int m = 0; m < bands; ++m) {
    const double hi = std::ldexp(deltabar, -m);
    const double lo = hi / 2.0;
    std::vector<double> deltas;
    for (int i = 0; i < kScan; ++i) deltas.push_back(hi - (hi - lo) * i / (kScan - 1));
    const auto zeros = find_vanishing(field, ze, deltas);
    if (zeros.empty()) {
      result.residual = std::numeric_limits<double>::infinity();
      return result;
    }
    for (const auto& z : zeros) {
      worst = std::max(worst, z.norm);
      result.samples.push_back({z.delta, meridian_G(field, ze, z.delta)});
    }
  }
  result.residual = worst;
  if (worst <= options.tolerance) result.value = Vector::Zero(ze.coords.size());
  return result;
}

// ---------------------------------------------------------------------------
// Reports

std::string to_string(NullVerdict v) {
  switch (v) {
    case NullVerdict::NonNull: return "non_null";
    case NullVerdict::Null: return "null";
    case NullVerdict::NotCompactifiedByThisRho: return "not_compactified_by_this_rho";
  }
  return "?";
}

EquatorReport summarize(std::string rho, std::vector<EquatorPoint> points, std::vector<LimitResult> limits) {
  EquatorReport rep;
  rep.rho = std::move(rho);
  rep.points = std::move(points);
  rep.limits = std::move(limits);
  bool all_converged = true;
  for (std::size_t i = 0; i < rep.limits.size(); ++i) {
    const auto& l = rep.limits[i];
    if (l.diverged) ++rep.diverged;
    if (!l.value) {
      all_converged = false;
      if (!l.diverged) ++rep.unresolved;
      continue;
    }
    rep.max_residual = std::max(rep.max_residual, l.residual);
    rep.max_norm = std::max(rep.max_norm, l.value->norm());
    rep.max_last_coordinate = std::max(rep.max_last_coordinate, std::abs((*l.value)[l.value->size() - 1]));
    if (i > 0 && rep.limits[i - 1].value) {
      const double dz = (rep.points[i].coords - rep.points[i - 1].coords).norm();
      if (dz > 0.0) {
        rep.lipschitz_quotient =
            std::max(rep.lipschitz_quotient, (*l.value - *rep.limits[i - 1].value).norm() / dz);
      }
    }
  }
  if (!all_converged) {
    rep.verdict = NullVerdict::NotCompactifiedByThisRho;
  } else if (rep.max_norm <= kNullTolerance) {
    rep.verdict = NullVerdict::Null;
  } else if (rep.max_norm >= kNonzeroTolerance) {
    rep.verdict = NullVerdict::NonNull;
  } else {
    rep.verdict = NullVerdict::NotCompactifiedByThisRho;
  }
  rep.equator_invariant = all_converged && rep.max_last_coordinate <= kNullTolerance;
  return rep;
}

EquatorReport equator_report(const VectorField& field, const Regularizer& rho, const std::vector<EquatorPoint>& grid,
                             const std::vector<double>& schedule) {
  std::vector<LimitResult> limits(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { limits[i] = equator_limit(field, rho, grid[i], schedule); });
  EquatorReport rep = summarize(rho.describe(), grid, std::move(limits));
  if (rho.kind() == Regularizer::Kind::Probe) rep.anchor = rho.anchor();
  return rep;
}

ProbeResult nonnull_probe(const VectorField& field, const EquatorPoint& zbar, double deltabar,
                          const std::vector<EquatorPoint>& grid, const std::vector<double>& schedule) {
  const auto zeros = find_vanishing(field, zbar, probe_scan(deltabar, schedule));
  if (!zeros.empty()) {
    fail(ErrorCode::AnchorVanishes, "G(zbar, delta) vanishes at delta = " + Json(zeros.front().delta).dump());
  }
  ProbeResult out;
  out.rho = Regularizer::probe(std::make_shared<const VectorField>(field), zbar, deltabar);
  out.report = equator_report(field, *out.rho, grid, schedule);
  return out;
}

ProbeResult resolve_probe_auto(const VectorField& field, const std::vector<EquatorPoint>& grid, double deltabar,
                               const std::vector<double>& schedule, int max_anchors) {
  // Norms at the smallest schedule delta where the whole grid is finite.
  std::vector<double> norms(grid.size(), 0.0);
  for (double d : schedule) {
    if (d > deltabar) continue;
    std::vector<double> trial(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { trial[i] = meridian_G(field, grid[i], d).norm(); });
    if (!std::all_of(trial.begin(), trial.end(), [](double v) { return std::isfinite(v); })) break;
    norms = std::move(trial);
  }
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });

  int rejected = 0;
  for (std::size_t k = 0; k < order.size() && rejected < max_anchors; ++k) {
    const auto& candidate = grid[order[k]];
    if (norms[order[k]] == 0.0) break;
    try {
      ProbeResult r = nonnull_probe(field, candidate, deltabar, grid, schedule);
      r.rejected_anchors = rejected;
      return r;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AnchorVanishes) throw;
      ++rejected;
    }
  }

  ProbeResult out;
  out.rejected_anchors = rejected;
  std::vector<LimitResult> limits(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { limits[i] = vanishing_sequence_limit(field, grid[i], deltabar); });
  out.report = summarize("probe:vanishing_sequence", grid, std::move(limits));
  return out;
}

EquivalenceReport equivalence_check(const VectorField& field, const Regularizer& rho1, const Regularizer& rho2,
                                    const std::vector<SpherePoint>& points, const std::vector<double>& schedule) {
  struct PointOutcome {
    int kind = 0;  // 0 skipped, 1 zero match, 2 mismatch, 3 compared
    double error = 0.0;
  };
  std::vector<PointOutcome> outcome(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    const SpherePoint& z = points[i];
    Vector f1, f2;
    if (z.height() > 0.0) {
      f1 = regularized_field(field, rho1, z);
      f2 = regularized_field(field, rho2, z);
    } else {
      const EquatorPoint ze{z.coords};
      const LimitResult l1 = equator_limit(field, rho1, ze, schedule);
      const LimitResult l2 = equator_limit(field, rho2, ze, schedule);
      if (!l1.value || !l2.value) return;
      f1 = *l1.value;
      f2 = *l2.value;
    }
    const double n1 = f1.norm();
    const double n2 = f2.norm();
    if (n1 <= kNullTolerance && n2 <= kNullTolerance) {
      outcome[i].kind = 1;
    } else if ((n1 <= kNullTolerance && n2 >= kNonzeroTolerance) || (n2 <= kNullTolerance && n1 >= kNonzeroTolerance)) {
      outcome[i].kind = 2;
    } else if (n1 >= kNonzeroTolerance && n2 >= kNonzeroTolerance) {
      outcome[i].kind = 3;
      outcome[i].error = (f1 / n1 - f2 / n2).cwiseAbs().maxCoeff();
    }
  });
  EquivalenceReport rep;
  for (const auto& o : outcome) {
    if (o.kind == 0) ++rep.skipped;
    if (o.kind == 2) ++rep.zero_set_mismatches;
    if (o.kind == 3) {
      ++rep.compared;
      rep.max_direction_error = std::max(rep.max_direction_error, o.error);
    }
  }
  return rep;
}

std::optional<Regularizer> default_regularizer(const VectorField& field) {
  return std::visit(
      [](const auto& f) -> std::optional<Regularizer> {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, PolynomialField> || std::is_same_v<T, HomogeneousSumField>) {
          return Regularizer::power(f.degree() - 1);
        } else if constexpr (std::is_same_v<T, PwlRegionField> || std::is_same_v<T, LureForm>) {
          return Regularizer::one();
        } else {
          if (f.tag == FixtureTag::ExoticSphereG) return std::nullopt;
          return Regularizer::power(f.default_degree() - 1);
        }
      },
      field);
}

}  // namespace infinitum
