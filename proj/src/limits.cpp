#include "infinitum/limits.hpp"

#include <cmath>
#include <limits>

#include "infinitum/errors.hpp"

namespace infinitum {

std::vector<double> default_schedule() {
  std::vector<double> s;
  s.reserve(41);
  for (int k = 0; k <= 40; ++k) s.push_back(std::ldexp(0.1, -k));
  return s;
}

namespace {

double max_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

struct Estimate {
  Vector value;
  double residual = std::numeric_limits<double>::infinity();
};

Estimate ridders(const std::vector<LimitSample>& samples, double ratio, const LimitOptions& opt) {
  Estimate best;
  if (samples.size() < 2) return best;
  const int order = opt.max_order;
  std::vector<Vector> prev;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::vector<Vector> row;
    row.reserve(static_cast<std::size_t>(order) + 1);
    row.push_back(samples[i].value);
    const int top = std::min<int>(static_cast<int>(i), order);
    for (int j = 1; j <= top; ++j) {
      const double fac = std::pow(ratio, j);
      const Vector& left = row[static_cast<std::size_t>(j - 1)];
      const Vector& up = prev[static_cast<std::size_t>(j - 1)];
      row.push_back(left + (left - up) / (fac - 1.0));
      const Vector& t = row.back();
      const double err = std::max(max_norm(t - left), max_norm(t - up));
      if (err <= best.residual) {
        best.residual = err;
        best.value = t;
      }
    }
    if (i >= 1 && top >= 1) {
      const int prev_top = static_cast<int>(prev.size()) - 1;
      const double jump = max_norm(row[static_cast<std::size_t>(top)] - prev[static_cast<std::size_t>(prev_top)]);
      if (jump >= opt.safe * best.residual && i >= static_cast<std::size_t>(order)) break;
    }
    prev = std::move(row);
  }
  return best;
}

Estimate tail(const std::vector<LimitSample>& samples, int window) {
  Estimate est;
  if (samples.size() < 2) return est;
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(window), samples.size());
  est.value = samples.back().value;
  double spread = 0.0;
  for (std::size_t i = samples.size() - w; i < samples.size(); ++i) {
    spread = std::max(spread, max_norm(samples[i].value - est.value));
  }
  est.residual = spread;
  return est;
}

}  // namespace

LimitResult extrapolate_limit(const std::function<Vector(double)>& sampler, const std::vector<double>& schedule,
                              const LimitOptions& opt) {
  if (schedule.size() < 2) fail(ErrorCode::InvalidRegularizer, "limit schedule needs at least two points");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0) || (i > 0 && !(schedule[i] < schedule[i - 1]))) {
      fail(ErrorCode::DeltaOutOfRange, "limit schedule must be positive and strictly decreasing");
    }
  }

  LimitResult result;
  bool overflowed = false;
  for (double delta : schedule) {
    Vector v = sampler(delta);
    if (!v.allFinite()) {
      overflowed = true;
      break;
    }
    result.samples.push_back({delta, std::move(v)});
  }

  const auto& s = result.samples;
  const std::size_t w = static_cast<std::size_t>(opt.growth_window);
  if (s.size() >= w) {
    bool growing = true;
    for (std::size_t i = s.size() - w + 1; i < s.size(); ++i) {
      if (!(s[i].value.norm() > s[i - 1].value.norm())) growing = false;
    }
    if (growing && (overflowed || s.back().value.norm() > opt.divergence_threshold)) {
      result.diverged = true;
      result.residual = std::numeric_limits<double>::infinity();
      return result;
    }
  } else if (overflowed && !s.empty()) {
    // Blew up before a growth window could be observed.
    result.diverged = s.size() >= 2 && s.back().value.norm() > s.front().value.norm();
  }
  if (s.size() < 2) {
    result.residual = std::numeric_limits<double>::infinity();
    return result;
  }

  const double ratio = schedule[0] / schedule[1];
  const Estimate r = ridders(s, ratio, opt);
  const Estimate t = tail(s, opt.growth_window);
  const Estimate& best = r.residual <= t.residual ? r : t;
  result.residual = best.residual;
  if (!result.diverged && best.residual <= opt.tolerance) result.value = best.value;
  return result;
}

}  // namespace infinitum
