#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace infinitum {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Exponent vector of a monomial x^alpha.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exponents);

  static MultiIndex zero(int n) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(n), 0)); }
  static MultiIndex unit(int n, int i);

  int size() const { return static_cast<int>(exponents_.size()); }
  int order() const;  // |alpha|
  int operator[](int i) const { return exponents_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& exponents() const { return exponents_; }

  MultiIndex operator+(const MultiIndex& other) const;
  // Every exponent of `other` is at most the matching one here.
  bool divisible_by(const MultiIndex& other) const;
  MultiIndex operator-(const MultiIndex& other) const;

  double monomial(const Vector& x) const;

  auto operator<=>(const MultiIndex&) const = default;

 private:
  std::vector<int> exponents_;
};

/// Sparse real polynomial in n variables.
class ScalarPolynomial {
 public:
  explicit ScalarPolynomial(int n = 0) : n_(n) {}
  ScalarPolynomial(int n, std::map<MultiIndex, double> terms);

  int dimension() const { return n_; }
  const std::map<MultiIndex, double>& terms() const { return terms_; }
  double coefficient(const MultiIndex& alpha) const;
  bool is_zero() const;
  int degree() const;  // -1 for the zero polynomial
  bool is_homogeneous(int l) const;
  double eval(const Vector& x) const;

 private:
  int n_;
  std::map<MultiIndex, double> terms_;
};

/// Polynomial vector field f(x) = sum_alpha f_alpha x^alpha.
class PolynomialField {
 public:
  struct Term {
    MultiIndex alpha;
    Vector coeff;
  };

  explicit PolynomialField(int n = 0) : n_(n) {}
  PolynomialField(int n, const std::vector<Term>& terms);  // rejects duplicate multi-indices
  static PolynomialField from_map(int n, std::map<MultiIndex, Vector> terms);

  // q(x) * x
  static PolynomialField radial(const ScalarPolynomial& q);

  int dimension() const { return n_; }
  const std::map<MultiIndex, Vector>& terms() const { return terms_; }
  bool is_zero() const;
  int degree() const;  // throws ZeroField
  Vector eval(const Vector& x) const;
  PolynomialField homogeneous_part(int l) const;
  // Component i as a scalar polynomial.
  ScalarPolynomial component(int i) const;

  PolynomialField operator+(const PolynomialField& other) const;
  PolynomialField operator-(const PolynomialField& other) const;

 private:
  int n_;
  std::map<MultiIndex, Vector> terms_;
};

int degree(const PolynomialField& field);
PolynomialField homogeneous_part(const PolynomialField& field, int l);

/// Returns q with f^N(x) = q(x) x, decided exactly on the stored coefficients.
std::optional<ScalarPolynomial> leading_is_radial(const PolynomialField& field);

/// f(x) = sum_l ||x||^{r_l} P_l(x), each P_l a homogeneous polynomial field,
/// so each piece is homogeneous of degree deg(P_l) + r_l.
class HomogeneousSumField {
 public:
  struct Piece {
    int norm_power = 0;
    PolynomialField poly;
  };

  HomogeneousSumField(int n, std::vector<Piece> pieces);

  int dimension() const { return n_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  int degree() const;
  Vector eval(const Vector& x) const;
  // Sum of the pieces of the given degree.
  Vector eval_part(int l, const Vector& x) const;

 private:
  int n_;
  std::vector<Piece> pieces_;
};

/// a^T x < c (strict) or a^T x <= c.
struct HalfSpace {
  Vector a;
  double c = 0.0;
  bool strict = false;

  bool contains(const Vector& x) const;
};

struct Guard {
  std::vector<HalfSpace> constraints;

  // {x : lo < k^T x <= hi}; infinite bounds drop the matching constraint.
  static Guard slab(const Vector& k, double lo, double hi);
  bool contains(const Vector& x) const;
};

/// Continuous piecewise-affine field f(x) = A_i x + b_i on region i.
class PwlRegionField {
 public:
  struct Region {
    Matrix A;
    Vector b;
    Guard guard;
  };

  PwlRegionField(int n, std::vector<Region> regions);

  int dimension() const { return n_; }
  const std::vector<Region>& regions() const { return regions_; }
  // Lowest-index region containing x.
  int locate(const Vector& x) const;
  Vector eval(const Vector& x) const;

 private:
  void check_partition() const;
  void check_continuity() const;

  int n_;
  std::vector<Region> regions_;
};

/// f(x) = A x + phi(k^T x) b with phi continuous piecewise affine.
struct LureForm {
  Matrix A;
  Vector b;
  Vector k;
  std::vector<double> breaks;      // tau_1 < ... < tau_p
  std::vector<double> slopes;      // alpha_0 .. alpha_p
  std::vector<double> intercepts;  // beta_0 .. beta_p

  int dimension() const { return static_cast<int>(A.rows()); }
  int pieces() const { return static_cast<int>(slopes.size()); }
  void validate() const;
  // Index of the affine piece of phi used at sigma.
  int piece_at(double sigma) const;
  double phi(double sigma) const;
  Vector eval(const Vector& x) const;
  // Linear part of the region with phi-piece i: A + alpha_i b k^T.
  Matrix region_matrix(int i) const;
};

enum class FixtureTag { CosRadial, NormRadial, NormRotation, ExoticSphereG, PiecewiseExample };

std::string_view to_string(FixtureTag tag);
FixtureTag fixture_tag_from_string(std::string_view name);

struct NamedFixture {
  FixtureTag tag = FixtureTag::CosRadial;
  int n = 2;
  Matrix rotation;  // used by NormRotation

  static NamedFixture make(FixtureTag tag, int n);
  // Growth degree used for the default power regularizer.
  int default_degree() const;
};

// Native meridian function of the ExoticSphereG fixture at an equator point
// (given by its n+1 coordinates) and latitude delta.
Vector exotic_meridian(const Vector& equator_coords, double delta);

using VectorField = std::variant<PolynomialField, HomogeneousSumField, PwlRegionField, LureForm, NamedFixture>;

int dimension(const VectorField& field);
bool is_sphere_only(const VectorField& field);
std::string type_name(const VectorField& field);
Vector eval(const VectorField& field, const Vector& x);

}  // namespace infinitum
