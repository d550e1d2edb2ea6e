#include "infinitum/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"

#include "infinitum/errors.hpp"
#include "infinitum/field_json.hpp"
#include "infinitum/flow.hpp"
#include "infinitum/parallel.hpp"
#include "infinitum/poly_analysis.hpp"
#include "infinitum/pwl.hpp"

namespace infinitum::cli {

int exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotLure:
    case ErrorCode::PreconditionNonNull:
    case ErrorCode::NotNormalized:
    case ErrorCode::ZeroNormal:
    case ErrorCode::AnchorVanishes:
    case ErrorCode::SphereOnlyField:
    case ErrorCode::EquatorPoint:
    case ErrorCode::NorthPole:
      return kPrecondition;
    case ErrorCode::OmegaDiverged:
    case ErrorCode::NonConvergence:
    case ErrorCode::StepFailure:
      return kDiverged;
    default:
      return kMalformed;
  }
}

std::optional<Regularizer> parse_rho(const std::string& spec) {
  if (spec == "one") return Regularizer::one();
  if (spec == "probe:auto") return std::nullopt;
  if (spec.rfind("power:", 0) == 0) {
    const std::string num = spec.substr(6);
    char* end = nullptr;
    const double s = std::strtod(num.c_str(), &end);
    if (num.empty() || end == num.c_str() || *end != '\0') {
      fail(ErrorCode::MalformedInput, "bad exponent in '" + spec + "'");
    }
    return Regularizer::power(s);
  }
  fail(ErrorCode::MalformedInput, "rho must be power:S, one or probe:auto, got '" + spec + "'");
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

VectorField load_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::MalformedInput, "cannot open '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    fail(ErrorCode::MalformedInput, std::string("invalid JSON: ") + e.what());
  }
  return field_from_json(doc);
}

Vector parse_vector(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double d = std::strtod(item.c_str(), &end);
    if (item.empty() || end == item.c_str() || *end != '\0') fail(ErrorCode::MalformedInput, "bad number '" + item + "'");
    v.push_back(d);
  }
  if (v.empty()) fail(ErrorCode::MalformedInput, "empty vector");
  return Eigen::Map<Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Writes to the named file, or to `fallback` for "-" or an empty name.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_.open(path);
      if (!file_) fail(ErrorCode::MalformedInput, "cannot write '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

Json json_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json scalar_poly_json(const ScalarPolynomial& q) {
  Json terms = Json::array();
  for (const auto& [alpha, c] : q.terms()) {
    if (c != 0.0) terms.push_back({{"alpha", alpha.exponents()}, {"coeff", c}});
  }
  return terms;
}

std::optional<LureForm> lure_of(const VectorField& field, LureAnchor anchor = LureAnchor::Origin) {
  if (const auto* l = std::get_if<LureForm>(&field)) return *l;
  if (const auto* r = std::get_if<PwlRegionField>(&field)) return lure_extract(*r, anchor);
  return std::nullopt;
}

Json field_summary(const VectorField& field) {
  Json j = {{"type", type_name(field)}, {"n", dimension(field)}};
  if (const auto* p = std::get_if<PolynomialField>(&field)) j["degree"] = p->degree();
  if (const auto* h = std::get_if<HomogeneousSumField>(&field)) j["degree"] = h->degree();
  if (const auto* f = std::get_if<NamedFixture>(&field)) j["tag"] = std::string(to_string(f->tag));
  return j;
}

struct GridOptions {
  int m = 32;
  std::uint64_t seed = 0;
  double jitter = 0.0;
  double deltabar = 0.1;
};

void add_grid_options(CLI::App* cmd, GridOptions& g) {
  cmd->add_option("--grid", g.m, "points per angular dimension of the equator grid")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", g.seed, "seed for grid jitter");
  cmd->add_option("--jitter", g.jitter, "grid jitter in units of one grid step")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--deltabar", g.deltabar, "probe latitude bound")->check(CLI::Range(1e-6, 1.0));
}

// rho from the flag, falling back to the family default; empty means probe auto.
std::optional<Regularizer> choose_rho(const VectorField& field, const std::string& spec) {
  if (spec.empty()) return default_regularizer(field);
  return parse_rho(spec);
}

int report_nonconvergence(std::ostream& err, const std::string& what, const Json& detail) {
  Json diag = {{"error", "NonConvergence"}, {"message", what}, {"detail", detail}};
  err << diag.dump() << "\n";
  return kDiverged;
}

// ---------------------------------------------------------------------------

int cmd_classify(const std::string& path, const std::string& rho_spec, const GridOptions& g, std::ostream& out,
                 std::ostream& err) {
  const VectorField field = load_field(path);
  const int n = dimension(field);
  const auto grid = equator_grid(n, g.m, g.jitter, g.seed);
  const std::optional<Regularizer> rho = choose_rho(field, rho_spec);

  EquatorReport rep;
  Json doc;
  if (rho) {
    rep = equator_report(field, *rho, grid);
  } else {
    ProbeResult pr = resolve_probe_auto(field, grid, g.deltabar);
    rep = std::move(pr.report);
    doc["rejected_anchors"] = pr.rejected_anchors;
  }

  doc["field"] = field_summary(field);
  doc["rho"] = rep.rho;
  doc["grid"] = g.m;
  doc["verdict"] = to_string(rep.verdict);
  doc["null"] = rep.verdict == NullVerdict::NotCompactifiedByThisRho ? Json(nullptr)
                                                                      : Json(rep.verdict == NullVerdict::Null);
  doc["anchor"] = rep.anchor ? vector_to_json(rep.anchor->coords) : Json(nullptr);
  doc["equator_invariant"] = rep.equator_invariant;
  doc["max_last_coordinate"] = rep.max_last_coordinate;
  doc["max_norm"] = rep.max_norm;
  doc["max_residual"] = rep.max_residual;
  doc["lipschitz_quotient"] = rep.lipschitz_quotient;
  doc["diverged_points"] = rep.diverged;
  doc["unresolved_points"] = rep.unresolved;
  Json residuals = Json::array();
  for (const auto& l : rep.limits) residuals.push_back(l.value ? json_or_null(l.residual) : Json(nullptr));
  doc["residuals"] = residuals;

  // Closed-form witness where the family has one.
  Json witness = nullptr;
  if (const auto* p = std::get_if<PolynomialField>(&field)) {
    const NullClassification nc = classify_null(*p);
    if (nc.verdict == NullClassification::Verdict::IdenticallyNull) {
      witness = {{"kind", "radial_leading_part"}, {"q", scalar_poly_json(*nc.q)}};
    } else {
      witness = {{"kind", "equator_point"},
                 {"point", vector_to_json(nc.witness->coords)},
                 {"value", vector_to_json(nc.witness_value)}};
    }
    if (rho && rho->kind() == Regularizer::Kind::Power) {
      witness["invariance_criterion"] = invariance_criterion(rho->exponent(), p->degree());
    }
  } else if (auto lure = lure_of(field); lure && rho && rho->kind() == Regularizer::Kind::One) {
    const NormalizedLure nl = lure_normalize(*lure);
    const auto ext = external_matrices(nl.form);
    witness = {{"kind", "external_matrices"},
               {"scalar_multiples_of_identity", pwl_classify_null(nl.form)},
               {"A0", matrix_to_json(ext.A0)},
               {"Ap", matrix_to_json(ext.Ap)}};
  } else if (rep.verdict != NullVerdict::NotCompactifiedByThisRho) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < rep.limits.size(); ++i) {
      if (rep.limits[i].value->norm() > rep.limits[best].value->norm()) best = i;
    }
    witness = {{"kind", "largest_limit"},
               {"point", vector_to_json(rep.points[best].coords)},
               {"value", vector_to_json(*rep.limits[best].value)}};
  }
  doc["witness"] = witness;
  out << doc.dump(2) << "\n";

  if (rep.verdict == NullVerdict::NotCompactifiedByThisRho) {
    return report_nonconvergence(err, "equator limits diverge or do not converge under " + rep.rho,
                                 {{"diverged_points", rep.diverged}, {"unresolved_points", rep.unresolved}});
  }
  return kOk;
}

int cmd_equator_field(const std::string& path, const std::string& rho_spec, const GridOptions& g,
                      const std::string& out_path, std::ostream& out, std::ostream& err) {
  const VectorField field = load_field(path);
  const int n = dimension(field);
  const auto grid = equator_grid(n, g.m, g.jitter, g.seed);
  const std::optional<Regularizer> rho = choose_rho(field, rho_spec);

  std::vector<Vector> values(grid.size());
  std::vector<double> residual(grid.size(), 0.0);
  std::vector<std::string> source(grid.size(), "closed_form");
  std::optional<EquatorEvaluator> closed = rho ? equator_evaluator(field, *rho) : std::nullopt;
  if (closed) {
    parallel_for(grid.size(), [&](std::size_t i) { values[i] = (*closed)(grid[i]); });
  } else {
    std::vector<LimitResult> limits;
    if (rho) {
      limits = equator_report(field, *rho, grid).limits;
    } else {
      limits = resolve_probe_auto(field, grid, g.deltabar).report.limits;
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      source[i] = "limit";
      residual[i] = limits[i].residual;
      values[i] = limits[i].value ? *limits[i].value
                                  : Vector::Constant(n + 1, std::numeric_limits<double>::quiet_NaN());
    }
  }

  Sink sink(out_path, out);
  std::ostream& csv = sink.get();
  for (int i = 1; i <= n + 1; ++i) csv << "z" << i << ",";
  for (int i = 1; i <= n + 1; ++i) csv << "v" << i << ",";
  csv << "residual,source\n";
  int missing = 0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    for (int i = 0; i <= n; ++i) csv << fmt17(grid[p].coords[i]) << ",";
    for (int i = 0; i <= n; ++i) csv << fmt17(values[p][i]) << ",";
    csv << fmt17(residual[p]) << "," << source[p] << "\n";
    if (!values[p].allFinite()) ++missing;
  }
  if (missing > 0) return report_nonconvergence(err, "some equator limits did not converge", {{"points", missing}});
  return kOk;
}

int cmd_lure(const std::string& path, const std::string& out_path, bool normalize, const std::string& anchor_name,
             std::ostream& out) {
  const VectorField field = load_field(path);
  LureAnchor anchor = LureAnchor::Origin;
  if (anchor_name == "leftmost") {
    anchor = LureAnchor::Leftmost;
  } else if (anchor_name != "origin") {
    fail(ErrorCode::MalformedInput, "anchor must be origin or leftmost");
  }
  auto lure = lure_of(field, anchor);
  if (!lure) fail(ErrorCode::NotLure, "lure needs a pwl_regions or pwl_lure field");
  Json doc;
  if (normalize) {
    const NormalizedLure nl = lure_normalize(*lure);
    doc = lure_to_json(nl.form);
    doc["change_of_basis"] = matrix_to_json(nl.M);
  } else {
    doc = lure_to_json(*lure);
  }
  Sink sink(out_path, out);
  sink.get() << doc.dump(2) << "\n";
  return kOk;
}

int cmd_integrate(const std::string& path, const std::string& rho_spec, const std::string& x0_text,
                  const std::string& z0_text, IntegratorConfig cfg, const GridOptions& g,
                  const std::string& out_path, std::ostream& out, std::ostream& err) {
  const VectorField field = load_field(path);
  const int n = dimension(field);
  std::optional<Regularizer> rho = choose_rho(field, rho_spec);
  if (!rho) {
    ProbeResult pr = resolve_probe_auto(field, equator_grid(n, g.m, g.jitter, g.seed), g.deltabar);
    if (!pr.rho) fail(ErrorCode::AnchorVanishes, "no admissible probe anchor on the grid");
    rho = pr.rho;
  }
  SpherePoint z0;
  if (!x0_text.empty() == !z0_text.empty()) fail(ErrorCode::MalformedInput, "give exactly one of --x0 and --z0");
  if (!x0_text.empty()) {
    const Vector x0 = parse_vector(x0_text);
    if (x0.size() != n) fail(ErrorCode::DimensionMismatch, "--x0 has the wrong length");
    z0 = project(x0);
  } else {
    Vector z = parse_vector(z0_text);
    if (z.size() != n + 1) fail(ErrorCode::DimensionMismatch, "--z0 has the wrong length");
    z0 = SpherePoint::checked(z / z.norm());
  }

  const Trajectory traj = integrate(field, *rho, z0, cfg);
  Sink sink(out_path, out);
  std::ostream& csv = sink.get();
  csv << "t";
  for (int i = 1; i <= n + 1; ++i) csv << ",z" << i;
  csv << "\n";
  for (const auto& s : traj.samples) {
    csv << fmt17(s.t);
    for (int i = 0; i <= n; ++i) csv << "," << fmt17(s.z[i]);
    csv << "\n";
  }
  const auto& last = traj.samples.back();
  Json summary = {{"terminal", to_string(traj.terminal)},
                  {"samples", traj.samples.size()},
                  {"t_final", last.t},
                  {"z_final", vector_to_json(last.z)},
                  {"equator_handoff", traj.equator_handoff},
                  {"events", traj.events},
                  {"rho", rho->describe()}};
  if (!traj.message.empty()) summary["message"] = traj.message;
  if (out_path.empty() || out_path == "-") {
    err << summary.dump() << "\n";
  } else {
    out << summary.dump(2) << "\n";
  }
  if (traj.terminal == Terminal::StepFailure) {
    err << Json{{"error", "StepFailure"}, {"message", traj.message}}.dump() << "\n";
    return kDiverged;
  }
  return kOk;
}

int cmd_oracle_check(const std::string& path, const std::string& rho_spec, const GridOptions& g, double tol,
                     std::ostream& out, std::ostream& err) {
  const VectorField field = load_field(path);
  const int n = dimension(field);
  const std::optional<Regularizer> rho = choose_rho(field, rho_spec);
  if (!rho) fail(ErrorCode::PreconditionNonNull, "probe regularizers have no closed form to check against");

  std::optional<EquatorEvaluator> closed = equator_evaluator(field, *rho);
  std::string family = "equator_field";
  if (!closed) {
    const auto* p = std::get_if<PolynomialField>(&field);
    if (p && rho->kind() == Regularizer::Kind::Power && rho->exponent() == p->degree() - 2) {
      const PolynomialField f = *p;
      if (!leading_is_radial(f)) fail(ErrorCode::PreconditionNonNull, "delta^{N-2} needs a radial leading part");
      closed = [f](const EquatorPoint& ze) { return fallback_equator_field(f, ze); };
      family = "fallback_equator_field";
    }
  }
  if (!closed) fail(ErrorCode::PreconditionNonNull, "no closed-form equator field for this field and rho");

  const auto grid = equator_grid(n, g.m, g.jitter, g.seed);
  std::vector<double> diff(grid.size(), 0.0);
  std::vector<char> converged(grid.size(), 1);
  parallel_for(grid.size(), [&](std::size_t i) {
    const LimitResult l = equator_limit(field, *rho, grid[i]);
    if (!l.value) {
      converged[i] = 0;
      return;
    }
    diff[i] = ((*closed)(grid[i]) - *l.value).cwiseAbs().maxCoeff();
  });
  double worst = 0.0;
  int unconverged = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!converged[i]) {
      ++unconverged;
    } else {
      worst = std::max(worst, diff[i]);
    }
  }
  const bool pass = unconverged == 0 && worst <= tol;
  Json doc = {{"field", field_summary(field)}, {"rho", rho->describe()},    {"closed_form", family},
              {"points", grid.size()},         {"max_residual", worst},     {"unconverged", unconverged},
              {"tolerance", tol},              {"pass", pass}};
  out << doc.dump(2) << "\n";
  if (!pass) return report_nonconvergence(err, "closed form and numerical limit disagree", doc);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Poincare compactification of vector fields on R^n"};
  app.require_subcommand(1);

  std::string field_path;
  std::string rho_spec;
  std::string out_path;
  GridOptions grid;

  auto* classify = app.add_subcommand("classify", "null / non-null and invariance report");
  classify->add_option("--field", field_path, "field JSON")->required();
  classify->add_option("--rho", rho_spec, "power:S, one or probe:auto");
  add_grid_options(classify, grid);

  auto* eqfield = app.add_subcommand("equator-field", "sample the equator field on a grid");
  eqfield->add_option("--field", field_path, "field JSON")->required();
  eqfield->add_option("--rho", rho_spec, "power:S, one or probe:auto");
  eqfield->add_option("--out", out_path, "CSV output ('-' for stdout)");
  add_grid_options(eqfield, grid);

  bool normalize = false;
  std::string anchor = "origin";
  auto* lure = app.add_subcommand("lure", "extract the Lure form of a PWL field");
  lure->add_option("--field", field_path, "field JSON")->required();
  lure->add_option("--out", out_path, "JSON output ('-' for stdout)");
  lure->add_flag("--normalize", normalize, "rotate so that k = e_1");
  lure->add_option("--anchor", anchor, "region with alpha = 0: origin or leftmost");

  IntegratorConfig cfg;
  std::string x0_text;
  std::string z0_text;
  auto* integ = app.add_subcommand("integrate", "integrate the compactified field");
  integ->add_option("--field", field_path, "field JSON")->required();
  integ->add_option("--rho", rho_spec, "power:S, one or probe:auto");
  integ->add_option("--x0", x0_text, "initial point in R^n, comma separated");
  integ->add_option("--z0", z0_text, "initial point on the hemisphere, comma separated");
  integ->add_option("--t", cfg.t_end, "final time (negative integrates backward)");
  integ->add_option("--out", out_path, "CSV output ('-' for stdout)");
  integ->add_option("--rtol", cfg.rel_tol, "relative tolerance");
  integ->add_option("--atol", cfg.abs_tol, "absolute tolerance");
  integ->add_option("--dt-init", cfg.dt_init, "initial step");
  integ->add_option("--dt-min", cfg.dt_min, "minimum step");
  integ->add_option("--dt-max", cfg.dt_max, "maximum step");
  add_grid_options(integ, grid);

  double tol = 1e-6;
  auto* oracle = app.add_subcommand("oracle-check", "closed-form equator field against the numerical limit");
  oracle->add_option("--field", field_path, "field JSON")->required();
  oracle->add_option("--rho", rho_spec, "power:S or one");
  oracle->add_option("--tol", tol, "acceptance tolerance");
  add_grid_options(oracle, grid);

  std::vector<std::string> argv_store{"infinitum"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kMalformed;
  }

  try {
    if (*classify) return cmd_classify(field_path, rho_spec, grid, out, err);
    if (*eqfield) return cmd_equator_field(field_path, rho_spec, grid, out_path, out, err);
    if (*lure) return cmd_lure(field_path, out_path, normalize, anchor, out);
    if (*integ) return cmd_integrate(field_path, rho_spec, x0_text, z0_text, cfg, grid, out_path, out, err);
    if (*oracle) return cmd_oracle_check(field_path, rho_spec, grid, tol, out, err);
  } catch (const Error& e) {
    err << Json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}}.dump() << "\n";
    return exit_status(e.code());
  }
  return kMalformed;
}

}  // namespace infinitum::cli
