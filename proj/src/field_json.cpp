#include "infinitum/field_json.hpp"

#include <cmath>
#include <limits>

#include "infinitum/errors.hpp"

namespace infinitum {

namespace {

const Json& member(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) fail(ErrorCode::MalformedInput, std::string("missing key '") + key + "'");
  return doc.at(key);
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) fail(ErrorCode::MalformedInput, std::string(what) + " must be a number");
  return j.get<double>();
}

int integer(const Json& j, const char* what) {
  if (!j.is_number_integer()) fail(ErrorCode::MalformedInput, std::string(what) + " must be an integer");
  return j.get<int>();
}

std::vector<double> numbers(const Json& j, const char* what) {
  if (!j.is_array()) fail(ErrorCode::MalformedInput, std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(number(e, what));
  return out;
}

double bound(const Json& guard, const char* key, double infinite) {
  if (!guard.contains(key) || guard.at(key).is_null()) return infinite;
  return number(guard.at(key), key);
}

Guard guard_from_json(const Json& j, int n) {
  if (!j.is_object()) fail(ErrorCode::MalformedInput, "guard must be an object");
  if (j.contains("inequalities")) {
    Guard g;
    for (const auto& ineq : member(j, "inequalities")) {
      HalfSpace h{vector_from_json(member(ineq, "a")), number(member(ineq, "c"), "c"), false};
      if (ineq.contains("strict")) h.strict = ineq.at("strict").get<bool>();
      if (h.a.size() != n) fail(ErrorCode::DimensionMismatch, "guard inequality normal");
      g.constraints.push_back(std::move(h));
    }
    return g;
  }
  const Vector k = vector_from_json(member(j, "k"));
  if (k.size() != n) fail(ErrorCode::DimensionMismatch, "guard normal");
  const double inf = std::numeric_limits<double>::infinity();
  return Guard::slab(k, bound(j, "lo", -inf), bound(j, "hi", inf));
}

Json guard_to_json(const Guard& g) {
  Json ineqs = Json::array();
  for (const auto& h : g.constraints) {
    ineqs.push_back({{"a", vector_to_json(h.a)}, {"c", h.c}, {"strict", h.strict}});
  }
  return {{"inequalities", ineqs}};
}

Json terms_to_json(const PolynomialField& p) {
  Json terms = Json::array();
  for (const auto& [alpha, c] : p.terms()) terms.push_back({{"alpha", alpha.exponents()}, {"coeff", vector_to_json(c)}});
  return terms;
}

PolynomialField poly_from_terms(const Json& terms, int n) {
  if (!terms.is_array()) fail(ErrorCode::MalformedInput, "terms must be an array");
  std::vector<PolynomialField::Term> out;
  for (const auto& t : terms) {
    const Json& alpha = member(t, "alpha");
    if (!alpha.is_array()) fail(ErrorCode::MalformedInput, "alpha must be an array");
    std::vector<int> e;
    for (const auto& a : alpha) e.push_back(integer(a, "alpha entry"));
    out.push_back({MultiIndex(std::move(e)), vector_from_json(member(t, "coeff"))});
  }
  return PolynomialField(n, out);
}

VectorField parse(const Json& doc) {
  const Json& type_j = member(doc, "type");
  if (!type_j.is_string()) fail(ErrorCode::MalformedInput, "type must be a string");
  const std::string type = type_j.get<std::string>();

  if (type == "polynomial") {
    const int n = integer(member(doc, "n"), "n");
    return poly_from_terms(member(doc, "terms"), n);
  }
  if (type == "homogeneous_sum") {
    const int n = integer(member(doc, "n"), "n");
    std::vector<HomogeneousSumField::Piece> pieces;
    for (const auto& p : member(doc, "pieces")) {
      pieces.push_back({integer(member(p, "norm_power"), "norm_power"), poly_from_terms(member(p, "terms"), n)});
    }
    return HomogeneousSumField(n, std::move(pieces));
  }
  if (type == "pwl_regions") {
    const int n = integer(member(doc, "n"), "n");
    std::vector<PwlRegionField::Region> regions;
    for (const auto& r : member(doc, "regions")) {
      regions.push_back({matrix_from_json(member(r, "A")), vector_from_json(member(r, "b")),
                         guard_from_json(member(r, "guard"), n)});
    }
    return PwlRegionField(n, std::move(regions));
  }
  if (type == "pwl_lure") return lure_from_json(doc);
  if (type == "fixture") {
    const Json& tag = member(doc, "tag");
    if (!tag.is_string()) fail(ErrorCode::MalformedInput, "fixture tag must be a string");
    const int n = doc.contains("n") ? integer(doc.at("n"), "n") : 2;
    NamedFixture fx = NamedFixture::make(fixture_tag_from_string(tag.get<std::string>()), n);
    if (doc.contains("R")) {
      fx.rotation = matrix_from_json(doc.at("R"));
      if (fx.rotation.rows() != n || fx.rotation.cols() != n) fail(ErrorCode::DimensionMismatch, "fixture rotation");
    }
    return fx;
  }
  fail(ErrorCode::MalformedInput, "unknown field type '" + type + "'");
}

}  // namespace

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_to_json(m.row(i).transpose()));
  return out;
}

Vector vector_from_json(const Json& j) {
  const auto v = numbers(j, "vector");
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) fail(ErrorCode::MalformedInput, "matrix must be a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Matrix m;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto row = numbers(j[static_cast<std::size_t>(i)], "matrix row");
    if (i == 0) m.resize(rows, static_cast<Eigen::Index>(row.size()));
    if (static_cast<Eigen::Index>(row.size()) != m.cols()) fail(ErrorCode::MalformedInput, "ragged matrix");
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(i, c) = row[static_cast<std::size_t>(c)];
  }
  return m;
}

LureForm lure_from_json(const Json& doc) {
  LureForm lure{matrix_from_json(member(doc, "A")),
                vector_from_json(member(doc, "b")),
                vector_from_json(member(doc, "k")),
                numbers(member(doc, "breaks"), "breaks"),
                numbers(member(doc, "slopes"), "slopes"),
                numbers(member(doc, "intercepts"), "intercepts")};
  if (doc.contains("n") && integer(doc.at("n"), "n") != lure.dimension()) {
    fail(ErrorCode::DimensionMismatch, "declared n disagrees with A");
  }
  lure.validate();
  return lure;
}

Json lure_to_json(const LureForm& lure) {
  return {{"type", "pwl_lure"},          {"n", lure.dimension()},   {"A", matrix_to_json(lure.A)},
          {"b", vector_to_json(lure.b)}, {"k", vector_to_json(lure.k)}, {"breaks", lure.breaks},
          {"slopes", lure.slopes},       {"intercepts", lure.intercepts}};
}

VectorField field_from_json(const Json& doc) {
  try {
    return parse(doc);
  } catch (const Json::exception& e) {
    fail(ErrorCode::MalformedInput, e.what());
  }
}

Json field_to_json(const VectorField& field) {
  return std::visit(
      [](const auto& f) -> Json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, PolynomialField>) {
          return {{"type", "polynomial"}, {"n", f.dimension()}, {"terms", terms_to_json(f)}};
        } else if constexpr (std::is_same_v<T, HomogeneousSumField>) {
          Json pieces = Json::array();
          for (const auto& p : f.pieces()) pieces.push_back({{"norm_power", p.norm_power}, {"terms", terms_to_json(p.poly)}});
          return {{"type", "homogeneous_sum"}, {"n", f.dimension()}, {"pieces", pieces}};
        } else if constexpr (std::is_same_v<T, PwlRegionField>) {
          Json regions = Json::array();
          for (const auto& r : f.regions()) {
            regions.push_back({{"A", matrix_to_json(r.A)}, {"b", vector_to_json(r.b)}, {"guard", guard_to_json(r.guard)}});
          }
          return {{"type", "pwl_regions"}, {"n", f.dimension()}, {"regions", regions}};
        } else if constexpr (std::is_same_v<T, LureForm>) {
          return lure_to_json(f);
        } else {
          return {{"type", "fixture"}, {"tag", std::string(to_string(f.tag))}, {"n", f.n}};
        }
      },
      field);
}

}  // namespace infinitum
