#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "infinitum/fields.hpp"
#include "infinitum/limits.hpp"
#include "infinitum/sphere.hpp"

namespace infinitum {

/// rho : (0, 1] -> R^+, restricted to the families power, one and probe.
class Regularizer {
 public:
  enum class Kind { Power, One, Probe };

  static Regularizer power(double s);
  static Regularizer one();
  // rho(delta) = 1 / ||G(zbar, min(delta, deltabar))||.
  static Regularizer probe(std::shared_ptr<const VectorField> field, EquatorPoint anchor, double deltabar);

  Kind kind() const { return kind_; }
  double exponent() const { return s_; }
  const EquatorPoint& anchor() const { return anchor_; }
  double deltabar() const { return deltabar_; }

  double operator()(double delta) const;
  // rho(delta) G(z, delta), computed as a quotient for the probe.
  Vector scale_meridian(const VectorField& field, const EquatorPoint& ze, double delta) const;
  std::string describe() const;

 private:
  Kind kind_ = Kind::One;
  double s_ = 0.0;
  std::shared_ptr<const VectorField> field_;
  EquatorPoint anchor_;
  double deltabar_ = 0.0;
};

// g(z) = Dh(h^{-1}(z)) f(h^{-1}(z)) on the open hemisphere.
Vector projected_field(const VectorField& field, const SpherePoint& z);
// G(z, delta) = g(z_delta); sphere-only fixtures use their own formula.
Vector meridian_G(const VectorField& field, const EquatorPoint& ze, double delta);
// rho(z_{n+1}) g(z) for z_{n+1} > 0.
Vector regularized_field(const VectorField& field, const Regularizer& rho, const SpherePoint& z);

LimitResult equator_limit(const VectorField& field, const Regularizer& rho, const EquatorPoint& ze,
                          const std::vector<double>& schedule = default_schedule(), const LimitOptions& options = {});

// Limit of ||delta^2 rho(delta) f(h^{-1}(z_delta))||; the vector is
// extrapolated first and the value holds its norm.
LimitResult invariance_test(const VectorField& field, const Regularizer& rho, const EquatorPoint& ze,
                            const std::vector<double>& schedule = default_schedule(),
                            const LimitOptions& options = {});

// A zero of delta -> G(z, delta) inside [lo, hi], if one is certified.
struct VanishingPoint {
  double delta;
  double norm;
};
std::vector<VanishingPoint> find_vanishing(const VectorField& field, const EquatorPoint& ze,
                                           const std::vector<double>& deltas);

// Limit along the certified zeros of G(z, .) in dyadic bands below deltabar:
// value 0 with residual max ||G|| at the zeros, absent if a band has none.
LimitResult vanishing_sequence_limit(const VectorField& field, const EquatorPoint& ze, double deltabar = 0.1,
                                     int bands = 8, const LimitOptions& options = {});

enum class NullVerdict { NonNull, Null, NotCompactifiedByThisRho };
std::string to_string(NullVerdict v);

struct EquatorReport {
  std::string rho;
  std::optional<EquatorPoint> anchor;
  std::vector<EquatorPoint> points;
  std::vector<LimitResult> limits;
  NullVerdict verdict = NullVerdict::NotCompactifiedByThisRho;
  bool equator_invariant = false;
  double max_residual = 0.0;
  double max_last_coordinate = 0.0;
  double max_norm = 0.0;
  // max ||v_i - v_j|| / ||z_i - z_j|| over consecutive grid points
  double lipschitz_quotient = 0.0;
  int diverged = 0;
  int unresolved = 0;
};

constexpr double kNullTolerance = 1e-8;
constexpr double kNonzeroTolerance = 1e-6;

EquatorReport summarize(std::string rho, std::vector<EquatorPoint> points, std::vector<LimitResult> limits);
EquatorReport equator_report(const VectorField& field, const Regularizer& rho, const std::vector<EquatorPoint>& grid,
                             const std::vector<double>& schedule = default_schedule());

struct ProbeResult {
  std::optional<Regularizer> rho;  // empty when no anchor is admissible
  EquatorReport report;
  int rejected_anchors = 0;
};

// Throws AnchorVanishes when G(zbar, .) has a zero on (0, deltabar].
ProbeResult nonnull_probe(const VectorField& field, const EquatorPoint& zbar, double deltabar,
                          const std::vector<EquatorPoint>& grid,
                          const std::vector<double>& schedule = default_schedule());

// Tries grid anchors in decreasing order of ||G(z, delta_min)||. If every
// anchor vanishes somewhere, the report is built from vanishing sequences.
ProbeResult resolve_probe_auto(const VectorField& field, const std::vector<EquatorPoint>& grid, double deltabar = 0.1,
                               const std::vector<double>& schedule = default_schedule(), int max_anchors = 8);

struct EquivalenceReport {
  int compared = 0;
  int zero_set_mismatches = 0;
  int skipped = 0;  // a limit did not converge or a norm fell between the thresholds
  double max_direction_error = 0.0;
};

// Compares F_{rho1} and F_{rho2} on hemisphere points (equator points through limits).
EquivalenceReport equivalence_check(const VectorField& field, const Regularizer& rho1, const Regularizer& rho2,
                                    const std::vector<SpherePoint>& points,
                                    const std::vector<double>& schedule = default_schedule());

// Regularizer used when none is requested; empty means probe auto.
std::optional<Regularizer> default_regularizer(const VectorField& field);

}  // namespace infinitum
