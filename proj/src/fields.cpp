#include "infinitum/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "infinitum/errors.hpp"

namespace infinitum {

namespace {

void require_dimension(int expected, Eigen::Index got, const char* what) {
  if (got != expected) {
    fail(ErrorCode::DimensionMismatch,
         std::string(what) + ": expected dimension " + std::to_string(expected) + ", got " + std::to_string(got));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// MultiIndex

MultiIndex::MultiIndex(std::vector<int> exponents) : exponents_(std::move(exponents)) {
  for (int e : exponents_) {
    if (e < 0) fail(ErrorCode::InvalidField, "multi-index exponents must be nonnegative");
  }
}

MultiIndex MultiIndex::unit(int n, int i) {
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  e[static_cast<std::size_t>(i)] = 1;
  return MultiIndex(std::move(e));
}

int MultiIndex::order() const { return std::accumulate(exponents_.begin(), exponents_.end(), 0); }

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  std::vector<int> e = exponents_;
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += other.exponents_[i];
  return MultiIndex(std::move(e));
}

bool MultiIndex::divisible_by(const MultiIndex& other) const {
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    if (exponents_[i] < other.exponents_[i]) return false;
  }
  return true;
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
  std::vector<int> e = exponents_;
  for (std::size_t i = 0; i < e.size(); ++i) e[i] -= other.exponents_[i];
  return MultiIndex(std::move(e));
}

double MultiIndex::monomial(const Vector& x) const {
  double value = 1.0;
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    for (int p = 0; p < exponents_[i]; ++p) value *= x[static_cast<Eigen::Index>(i)];
  }
  return value;
}

// ---------------------------------------------------------------------------
// ScalarPolynomial

ScalarPolynomial::ScalarPolynomial(int n, std::map<MultiIndex, double> terms) : n_(n), terms_(std::move(terms)) {
  for (const auto& [alpha, c] : terms_) {
    if (alpha.size() != n_) fail(ErrorCode::DimensionMismatch, "scalar polynomial multi-index length");
  }
}

double ScalarPolynomial::coefficient(const MultiIndex& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? 0.0 : it->second;
}

bool ScalarPolynomial::is_zero() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second == 0.0; });
}

int ScalarPolynomial::degree() const {
  int d = -1;
  for (const auto& [alpha, c] : terms_) {
    if (c != 0.0) d = std::max(d, alpha.order());
  }
  return d;
}

bool ScalarPolynomial::is_homogeneous(int l) const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [l](const auto& t) { return t.second == 0.0 || t.first.order() == l; });
}

double ScalarPolynomial::eval(const Vector& x) const {
  require_dimension(n_, x.size(), "ScalarPolynomial::eval");
  double value = 0.0;
  for (const auto& [alpha, c] : terms_) value += c * alpha.monomial(x);
  return value;
}

// ---------------------------------------------------------------------------
// PolynomialField

PolynomialField::PolynomialField(int n, const std::vector<Term>& terms) : n_(n) {
  for (const auto& term : terms) {
    if (term.alpha.size() != n) fail(ErrorCode::DimensionMismatch, "polynomial term multi-index length");
    require_dimension(n, term.coeff.size(), "polynomial term coefficient");
    if (!term.coeff.allFinite()) fail(ErrorCode::NonFiniteInput, "polynomial coefficient");
    if (!terms_.emplace(term.alpha, term.coeff).second) {
      fail(ErrorCode::InvalidField, "duplicate multi-index in polynomial field");
    }
  }
}

PolynomialField PolynomialField::from_map(int n, std::map<MultiIndex, Vector> terms) {
  PolynomialField f(n);
  f.terms_ = std::move(terms);
  for (const auto& [alpha, c] : f.terms_) {
    if (alpha.size() != n) fail(ErrorCode::DimensionMismatch, "polynomial term multi-index length");
    require_dimension(n, c.size(), "polynomial term coefficient");
  }
  return f;
}

PolynomialField PolynomialField::radial(const ScalarPolynomial& q) {
  const int n = q.dimension();
  std::map<MultiIndex, Vector> terms;
  for (const auto& [beta, c] : q.terms()) {
    if (c == 0.0) continue;
    for (int i = 0; i < n; ++i) {
      auto [it, inserted] = terms.try_emplace(beta + MultiIndex::unit(n, i), Vector::Zero(n));
      it->second[i] += c;
    }
  }
  return PolynomialField::from_map(n, std::move(terms));
}

bool PolynomialField::is_zero() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second.isZero(0.0); });
}

int PolynomialField::degree() const {
  int d = -1;
  for (const auto& [alpha, c] : terms_) {
    if (!c.isZero(0.0)) d = std::max(d, alpha.order());
  }
  if (d < 0) fail(ErrorCode::ZeroField, "polynomial field has no nonzero coefficient");
  return d;
}

Vector PolynomialField::eval(const Vector& x) const {
  require_dimension(n_, x.size(), "PolynomialField::eval");
  Vector value = Vector::Zero(n_);
  for (const auto& [alpha, c] : terms_) value += alpha.monomial(x) * c;
  return value;
}

PolynomialField PolynomialField::homogeneous_part(int l) const {
  std::map<MultiIndex, Vector> slice;
  for (const auto& [alpha, c] : terms_) {
    if (alpha.order() == l) slice.emplace(alpha, c);
  }
  return PolynomialField::from_map(n_, std::move(slice));
}

ScalarPolynomial PolynomialField::component(int i) const {
  std::map<MultiIndex, double> terms;
  for (const auto& [alpha, c] : terms_) {
    if (c[i] != 0.0) terms.emplace(alpha, c[i]);
  }
  return ScalarPolynomial(n_, std::move(terms));
}

PolynomialField PolynomialField::operator+(const PolynomialField& other) const {
  if (other.n_ != n_) fail(ErrorCode::DimensionMismatch, "adding polynomial fields");
  auto terms = terms_;
  for (const auto& [alpha, c] : other.terms_) {
    auto [it, inserted] = terms.try_emplace(alpha, Vector::Zero(n_));
    it->second += c;
  }
  return PolynomialField::from_map(n_, std::move(terms));
}

PolynomialField PolynomialField::operator-(const PolynomialField& other) const {
  if (other.n_ != n_) fail(ErrorCode::DimensionMismatch, "subtracting polynomial fields");
  auto terms = terms_;
  for (const auto& [alpha, c] : other.terms_) {
    auto [it, inserted] = terms.try_emplace(alpha, Vector::Zero(n_));
    it->second -= c;
  }
  return PolynomialField::from_map(n_, std::move(terms));
}

int degree(const PolynomialField& field) { return field.degree(); }

PolynomialField homogeneous_part(const PolynomialField& field, int l) { return field.homogeneous_part(l); }

std::optional<ScalarPolynomial> leading_is_radial(const PolynomialField& field) {
  const int n = field.dimension();
  const int big_n = field.degree();
  const PolynomialField lead = field.homogeneous_part(big_n);
  std::vector<ScalarPolynomial> comp;
  comp.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) comp.push_back(lead.component(i));

  // x_i f_j - x_j f_i == 0 for all i < j, coefficient by coefficient.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      std::map<MultiIndex, double> cross;
      for (const auto& [alpha, c] : comp[static_cast<std::size_t>(j)].terms()) cross[alpha + MultiIndex::unit(n, i)] += c;
      for (const auto& [alpha, c] : comp[static_cast<std::size_t>(i)].terms()) cross[alpha + MultiIndex::unit(n, j)] -= c;
      for (const auto& [alpha, c] : cross) {
        if (c != 0.0) return std::nullopt;
      }
    }
  }

  // Exact division of f_i by x_i.
  std::map<MultiIndex, double> q;
  for (int i = 0; i < n; ++i) {
    const MultiIndex ei = MultiIndex::unit(n, i);
    for (const auto& [alpha, c] : comp[static_cast<std::size_t>(i)].terms()) {
      if (!alpha.divisible_by(ei)) return std::nullopt;
      const MultiIndex beta = alpha - ei;
      auto [it, inserted] = q.try_emplace(beta, c);
      if (!inserted && it->second != c) return std::nullopt;
    }
  }
  return ScalarPolynomial(n, std::move(q));
}

// ---------------------------------------------------------------------------
// HomogeneousSumField

HomogeneousSumField::HomogeneousSumField(int n, std::vector<Piece> pieces) : n_(n), pieces_(std::move(pieces)) {
  for (const auto& piece : pieces_) {
    if (piece.poly.dimension() != n) fail(ErrorCode::DimensionMismatch, "homogeneous piece dimension");
    if (piece.norm_power < 0) fail(ErrorCode::InvalidField, "norm power must be nonnegative");
    if (piece.poly.is_zero()) continue;
    const int d = piece.poly.degree();
    for (const auto& [alpha, c] : piece.poly.terms()) {
      if (!c.isZero(0.0) && alpha.order() != d) fail(ErrorCode::InvalidField, "homogeneous piece is not homogeneous");
    }
  }
  if (degree() < 0) fail(ErrorCode::ZeroField, "homogeneous sum has no nonzero piece");
}

int HomogeneousSumField::degree() const {
  int d = -1;
  for (const auto& piece : pieces_) {
    if (!piece.poly.is_zero()) d = std::max(d, piece.poly.degree() + piece.norm_power);
  }
  return d;
}

Vector HomogeneousSumField::eval(const Vector& x) const {
  require_dimension(n_, x.size(), "HomogeneousSumField::eval");
  const double r = x.norm();
  Vector value = Vector::Zero(n_);
  for (const auto& piece : pieces_) value += std::pow(r, piece.norm_power) * piece.poly.eval(x);
  return value;
}

Vector HomogeneousSumField::eval_part(int l, const Vector& x) const {
  require_dimension(n_, x.size(), "HomogeneousSumField::eval_part");
  const double r = x.norm();
  Vector value = Vector::Zero(n_);
  for (const auto& piece : pieces_) {
    if (piece.poly.is_zero() || piece.poly.degree() + piece.norm_power != l) continue;
    value += std::pow(r, piece.norm_power) * piece.poly.eval(x);
  }
  return value;
}

// ---------------------------------------------------------------------------
// Guards and PWL region fields

bool HalfSpace::contains(const Vector& x) const {
  const double s = a.dot(x);
  return strict ? s < c : s <= c;
}

Guard Guard::slab(const Vector& k, double lo, double hi) {
  Guard g;
  if (std::isfinite(lo)) g.constraints.push_back({-k, -lo, true});
  if (std::isfinite(hi)) g.constraints.push_back({k, hi, false});
  return g;
}

bool Guard::contains(const Vector& x) const {
  return std::all_of(constraints.begin(), constraints.end(), [&](const HalfSpace& h) { return h.contains(x); });
}

PwlRegionField::PwlRegionField(int n, std::vector<Region> regions) : n_(n), regions_(std::move(regions)) {
  if (regions_.empty()) fail(ErrorCode::InvalidPartition, "PWL field needs at least one region");
  for (const auto& r : regions_) {
    if (r.A.rows() != n || r.A.cols() != n) fail(ErrorCode::DimensionMismatch, "region matrix must be n x n");
    require_dimension(n, r.b.size(), "region offset");
    if (!r.A.allFinite() || !r.b.allFinite()) fail(ErrorCode::NonFiniteInput, "region data");
    for (const auto& h : r.guard.constraints) {
      require_dimension(n, h.a.size(), "guard normal");
      if (h.a.norm() == 0.0) fail(ErrorCode::InvalidPartition, "guard constraint with zero normal");
    }
  }
  check_partition();
  check_continuity();
}

int PwlRegionField::locate(const Vector& x) const {
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    if (regions_[i].guard.contains(x)) return static_cast<int>(i);
  }
  fail(ErrorCode::InvalidPartition, "point not covered by any region");
}

Vector PwlRegionField::eval(const Vector& x) const {
  require_dimension(n_, x.size(), "PwlRegionField::eval");
  const auto& r = regions_[static_cast<std::size_t>(locate(x))];
  return r.A * x + r.b;
}

namespace {

double guard_scale(const std::vector<PwlRegionField::Region>& regions) {
  double scale = 1.0;
  for (const auto& r : regions) {
    for (const auto& h : r.guard.constraints) scale = std::max(scale, std::abs(h.c) / h.a.norm());
  }
  return 2.0 * scale;
}

}  // namespace

void PwlRegionField::check_partition() const {
  if (regions_.size() == 1 && regions_[0].guard.constraints.empty()) return;
  std::mt19937_64 rng(0);
  std::normal_distribution<double> gauss;
  const double base = guard_scale(regions_);
  for (double scale : {0.1 * base, base, 10.0 * base}) {
    for (int s = 0; s < 1000; ++s) {
      Vector x(n_);
      for (int i = 0; i < n_; ++i) x[i] = scale * gauss(rng);
      int hits = 0;
      for (const auto& r : regions_) hits += r.guard.contains(x) ? 1 : 0;
      if (hits != 1) {
        fail(ErrorCode::InvalidPartition,
             hits == 0 ? "regions do not cover a sampled point" : "regions overlap at a sampled point");
      }
    }
  }
}

void PwlRegionField::check_continuity() const {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> gauss;
  const double scale = guard_scale(regions_);
  const double eps = 1e-6 * (1.0 + scale);
  for (const auto& region : regions_) {
    for (const auto& h : region.guard.constraints) {
      const Vector unit = h.a / h.a.norm();
      const Vector base = h.c / h.a.squaredNorm() * h.a;
      for (int s = 0; s < 20; ++s) {
        Vector w(n_);
        for (int i = 0; i < n_; ++i) w[i] = scale * gauss(rng);
        const Vector x = base + w - unit.dot(w) * unit;
        int lo = 0;
        int hi = 0;
        try {
          lo = locate(x - eps * unit);
          hi = locate(x + eps * unit);
        } catch (const Error&) {
          continue;
        }
        if (lo == hi) continue;
        const auto& rl = regions_[static_cast<std::size_t>(lo)];
        const auto& rh = regions_[static_cast<std::size_t>(hi)];
        const Vector vl = rl.A * x + rl.b;
        const Vector vh = rh.A * x + rh.b;
        if ((vl - vh).norm() > 1e-10 * (1.0 + vl.norm())) {
          fail(ErrorCode::Discontinuous, "field jumps across the boundary between regions " + std::to_string(lo) +
                                             " and " + std::to_string(hi));
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// LureForm

void LureForm::validate() const {
  const auto n = A.rows();
  if (A.cols() != n || n == 0) fail(ErrorCode::DimensionMismatch, "Lure matrix must be square");
  if (b.size() != n || k.size() != n) fail(ErrorCode::DimensionMismatch, "Lure vectors b, k");
  const std::size_t p = breaks.size();
  if (slopes.size() != p + 1 || intercepts.size() != p + 1) {
    fail(ErrorCode::InvalidField, "Lure form needs p+1 slopes and intercepts for p breaks");
  }
  for (std::size_t i = 1; i < p; ++i) {
    if (!(breaks[i - 1] < breaks[i])) fail(ErrorCode::InvalidField, "Lure breaks must be strictly increasing");
  }
  if (p >= 1 && k.norm() == 0.0) fail(ErrorCode::ZeroNormal, "Lure normal k vanishes");
  for (std::size_t i = 1; i <= p; ++i) {
    const double t = breaks[i - 1];
    const double left = slopes[i - 1] * t + intercepts[i - 1];
    const double right = slopes[i] * t + intercepts[i];
    const double scale = std::max({1.0, std::abs(left), std::abs(right)});
    if (std::abs(left - right) > 1e-12 * scale) fail(ErrorCode::Discontinuous, "phi jumps at a break");
  }
}

int LureForm::piece_at(double sigma) const {
  // sigma <= tau_1 -> 0, tau_i <= sigma <= tau_{i+1} -> i, sigma >= tau_p -> p
  const auto it = std::lower_bound(breaks.begin(), breaks.end(), sigma);
  return static_cast<int>(it - breaks.begin());
}

double LureForm::phi(double sigma) const {
  const auto i = static_cast<std::size_t>(piece_at(sigma));
  return slopes[i] * sigma + intercepts[i];
}

Vector LureForm::eval(const Vector& x) const {
  if (x.size() != A.rows()) fail(ErrorCode::DimensionMismatch, "LureForm::eval");
  return A * x + phi(k.dot(x)) * b;
}

Matrix LureForm::region_matrix(int i) const { return A + slopes[static_cast<std::size_t>(i)] * b * k.transpose(); }

// ---------------------------------------------------------------------------
// Named fixtures

std::string_view to_string(FixtureTag tag) {
  switch (tag) {
    case FixtureTag::CosRadial: return "cos_radial";
    case FixtureTag::NormRadial: return "norm_radial";
    case FixtureTag::NormRotation: return "norm_rotation";
    case FixtureTag::ExoticSphereG: return "exotic_sphere_G";
    case FixtureTag::PiecewiseExample: return "piecewise_example";
  }
  return "unknown";
}

FixtureTag fixture_tag_from_string(std::string_view name) {
  for (auto tag : {FixtureTag::CosRadial, FixtureTag::NormRadial, FixtureTag::NormRotation, FixtureTag::ExoticSphereG,
                   FixtureTag::PiecewiseExample}) {
    if (to_string(tag) == name) return tag;
  }
  fail(ErrorCode::MalformedInput, "unknown fixture tag '" + std::string(name) + "'");
}

NamedFixture NamedFixture::make(FixtureTag tag, int n) {
  if (n < 1) fail(ErrorCode::InvalidField, "fixture dimension must be positive");
  if ((tag == FixtureTag::ExoticSphereG || tag == FixtureTag::PiecewiseExample) && n != 2) {
    fail(ErrorCode::InvalidField, std::string(to_string(tag)) + " is defined for n = 2 only");
  }
  if (tag == FixtureTag::NormRotation && n < 2) fail(ErrorCode::InvalidField, "norm_rotation needs n >= 2");
  NamedFixture fx{tag, n, Matrix::Identity(n, n)};
  if (n >= 2) {
    fx.rotation.topLeftCorner(2, 2) << 0.0, -1.0, 1.0, 0.0;
  }
  return fx;
}

int NamedFixture::default_degree() const {
  switch (tag) {
    case FixtureTag::CosRadial: return 1;
    case FixtureTag::NormRadial: return 2;
    case FixtureTag::NormRotation: return 2;
    case FixtureTag::ExoticSphereG: return 1;
    case FixtureTag::PiecewiseExample: return 2;
  }
  return 1;
}

Vector exotic_meridian(const Vector& z, double delta) {
  if (z.size() != 3) fail(ErrorCode::DimensionMismatch, "exotic_sphere_G lives on S^2");
  const double s = std::sqrt(1.0 - delta * delta);
  const double z1 = z[0];
  const double growth = std::exp(z1 * s / delta);
  // (delta, 0, -s z1) is orthogonal to z_delta; the denominator is its length.
  const double len = std::sqrt(s * s * z1 * z1 + delta * delta);
  Vector g(3);
  g << delta * growth / len, 0.0, -s * z1 * growth / len;
  return g;
}

namespace {

Vector eval_fixture(const NamedFixture& fx, const Vector& x) {
  require_dimension(fx.n, x.size(), "fixture eval");
  const double r = x.norm();
  switch (fx.tag) {
    case FixtureTag::CosRadial: return std::cos(r) * x;
    case FixtureTag::NormRadial: return r * x;
    case FixtureTag::NormRotation: return std::sqrt(1.0 + r * r) * (fx.rotation * x);
    case FixtureTag::ExoticSphereG: fail(ErrorCode::SphereOnlyField, "exotic_sphere_G is defined only through G(z, delta)");
    case FixtureTag::PiecewiseExample: {
      const double x1 = x[0];
      const double x2 = x[1];
      Vector v(2);
      if (x1 <= -1.0) {
        v << x2, x1;
      } else if (x1 <= 1.0) {
        v << x1 + x2 + x1 * x1, x1 + x2 + x1 * x2;
      } else {
        v << 2.0 * x1 + x2, x1 + 2.0 * x2;
      }
      return v;
    }
  }
  fail(ErrorCode::InvalidField, "unknown fixture");
}

}  // namespace

// ---------------------------------------------------------------------------
// VectorField dispatch

int dimension(const VectorField& field) {
  return std::visit(
      [](const auto& f) -> int {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, NamedFixture>) {
          return f.n;
        } else {
          return f.dimension();
        }
      },
      field);
}

bool is_sphere_only(const VectorField& field) {
  const auto* fx = std::get_if<NamedFixture>(&field);
  return fx != nullptr && fx->tag == FixtureTag::ExoticSphereG;
}

std::string type_name(const VectorField& field) {
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, PolynomialField>) return "polynomial";
        if constexpr (std::is_same_v<T, HomogeneousSumField>) return "homogeneous_sum";
        if constexpr (std::is_same_v<T, PwlRegionField>) return "pwl_regions";
        if constexpr (std::is_same_v<T, LureForm>) return "pwl_lure";
        if constexpr (std::is_same_v<T, NamedFixture>) return "fixture";
      },
      field);
}

Vector eval(const VectorField& field, const Vector& x) {
  if (!x.allFinite()) fail(ErrorCode::NonFiniteInput, "evaluation point");
  return std::visit(
      [&](const auto& f) -> Vector {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, NamedFixture>) {
          return eval_fixture(f, x);
        } else {
          return f.eval(x);
        }
      },
      field);
}

}  // namespace infinitum
