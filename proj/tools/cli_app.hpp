#pragma once

// Command-line front end. run() parses arguments, dispatches to the library
// and writes a JSON report; it returns the process exit code:
//   0 success, 1 demo criterion failed, 2 validation error, 3 non-convergence.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "acceptance/criteria.hpp"
#include "hmdiv/hmdiv.hpp"

namespace hmdiv::cli {

inline constexpr double kDefaultTol = ProjectionOptions{}.tol;

struct RunConfig {
  std::string command;
  std::uint64_t seed = 0;
  double tol = kDefaultTol;
  double boundary_tol = ProjectionOptions{}.boundary_tol;
  std::string method = "auto";
  bool bits = false;
  std::string out;

  std::string state;
  std::string hypergraph;
  int k = 0;
  std::string shape;
  std::string kind = "quantum";
  int n = 2;
  bool hermitian = false;
  bool exhaustive = false;
  int max_size = 0;
  std::string support;
  int restarts = SearchOptions{}.restarts;
  int threads = 0;
  std::string t;
  std::string lambda;
  int samples = 10000;
  int grid = 10;
};

/// Thrown for non-converged solver runs after the report has been assembled.
struct Unconverged {
  Json results;
  Json diagnostics;
};

namespace detail {

inline std::vector<double> parse_doubles(const std::string& list, std::size_t expected, const char* what) {
  std::vector<double> v;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParseError(std::string(what) + ": '" + item + "' is not a number");
    }
  }
  if (v.size() != expected)
    throw ParseError(std::string(what) + ": expected " + std::to_string(expected) + " comma-separated numbers");
  return v;
}

inline std::vector<std::string> split(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

/// A JSON file path, or a comma list of unit sizes combined with --kind.
inline SystemShape read_shape(const RunConfig& c) {
  if (c.shape.empty()) throw InvalidArgument("--shape is required");
  if (std::filesystem::exists(c.shape)) {
    const Json j = read_json_file(c.shape);
    return shape_from_json(j.contains("shape") ? j.at("shape") : j, c.shape);
  }
  return parse_shape_list(c.shape, parse_kind(c.kind));
}

inline Hypergraph read_model_hypergraph(const RunConfig& c, int units) {
  if (!c.hypergraph.empty() && c.k > 0) throw InvalidArgument("give either --hypergraph or --k, not both");
  if (!c.hypergraph.empty()) {
    Hypergraph u = read_hypergraph(c.hypergraph);
    if (u.units() != units)
      throw ShapeMismatch("hypergraph has " + std::to_string(u.units()) + " units, state has " + std::to_string(units));
    return u;
  }
  if (c.k > 0) {
    if (c.k > units) throw InvalidArgument("--k exceeds the number of units");
    return hypergraph_k(units, c.k);
  }
  throw InvalidArgument("a model is required: --hypergraph FILE or --k K");
}

inline ProjectionOptions projection_options(const RunConfig& c) {
  ProjectionOptions o;
  o.method = parse_method(c.method);
  o.tol = c.tol;
  o.boundary_tol = c.boundary_tol;
  return o;
}

inline Json vector_json(const RVector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline Json unit_set_json(UnitSet v) { return v.members(); }

inline Json projection_diagnostics(const ProjectionResult& r, const ProjectionOptions& o) {
  return Json{{"method", to_string(r.method)},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"boundary", r.boundary},
              {"constraint_residual", r.constraint_residual},
              {"tolerance", r.boundary ? o.boundary_tol : o.tol},
              {"notes", r.notes}};
}

/// Projection that must converge; otherwise the partial report is rethrown.
inline ProjectionResult project_or_report(const DensityMatrix& rho, const HierarchicalModelSpec& model,
                                          const ProjectionOptions& o) {
  ProjectionResult r = maxent_project(rho, model, o);
  if (!r.converged) throw Unconverged{Json{{"divergence", r.divergence}}, projection_diagnostics(r, o)};
  return r;
}

}  // namespace detail

class Runner {
 public:
  explicit Runner(RunConfig c) : c_(std::move(c)), scale_(c_.bits ? 1.0 / std::numbers::ln2 : 1.0) {}

  /// Fills `results` and `diagnostics`.
  void dispatch(Json& results, Json& diagnostics) {
    const std::string& cmd = c_.command;
    if (cmd == "project") project(results, diagnostics);
    else if (cmd == "ck") ck(results, diagnostics);
    else if (cmd == "decompose") decompose_cmd(results, diagnostics);
    else if (cmd == "multiinfo") multiinfo(results, diagnostics);
    else if (cmd == "dims") dims(results, diagnostics);
    else if (cmd == "basis") basis(results, diagnostics);
    else if (cmd == "feasibility") feasibility(results, diagnostics);
    else if (cmd == "toric") toric(results, diagnostics);
    else if (cmd == "maximize") maximize(results, diagnostics);
    else if (cmd == "bell") bell(results, diagnostics);
    else if (cmd == "theorem1") theorem1(results, diagnostics);
    else if (cmd == "fig1") fig1(results, diagnostics);
    else if (cmd == "demo") demo(results, diagnostics);
    else throw InvalidArgument("unknown command '" + cmd + "'");
  }

  bool demo_failed() const { return demo_failed_; }

 private:
  double info(double nats) const { return nats * scale_; }

  void project(Json& res, Json& diag) {
    const DensityMatrix rho = read_state(c_.state);
    const Hypergraph u = detail::read_model_hypergraph(c_, rho.shape().units());
    const HierarchicalModelSpec model = build_model(rho.shape(), u);
    const ProjectionOptions o = detail::projection_options(c_);
    const ProjectionResult r = detail::project_or_report(rho, model, o);
    res = Json{{"hypergraph", hypergraph_to_json(u)},
               {"divergence", info(r.divergence)},
               {"boundary", r.boundary},
               {"pi", state_to_json(r.pi)}};
    if (r.theta) res["theta"] = Json{{"values", detail::vector_json(r.theta->theta)}, {"log_z", r.theta->log_z}};
    diag = detail::projection_diagnostics(r, o);
  }

  void ck(Json& res, Json& diag) {
    const DensityMatrix rho = read_state(c_.state);
    const int n = rho.shape().units();
    if (c_.k < 1 || c_.k > n) throw InvalidArgument("--k must satisfy 1 <= k <= N");
    const ProjectionOptions o = detail::projection_options(c_);
    if (c_.k == n) {
      res = Json{{"k", c_.k}, {"value", 0.0}};
      diag = Json{{"method", "closed_form"}, {"notes", {"the power-set model contains every state"}}};
      return;
    }
    const ProjectionResult r = detail::project_or_report(rho, build_model(rho.shape(), hypergraph_k(n, c_.k)), o);
    res = Json{{"k", c_.k}, {"value", info(r.divergence)}};
    diag = detail::projection_diagnostics(r, o);
  }

  void decompose_cmd(Json& res, Json& diag) {
    const DensityMatrix rho = read_state(c_.state);
    const int n = rho.shape().units();
    if (n < 2) throw InvalidArgument("decompose needs at least two units");
    const ProjectionOptions o = detail::projection_options(c_);
    std::vector<ProjectionResult> proj;
    Json per_k = Json::array();
    for (int k = 1; k <= n; ++k) {
      proj.push_back(detail::project_or_report(rho, build_model(rho.shape(), hypergraph_k(n, k)), o));
      Json d = detail::projection_diagnostics(proj.back(), o);
      d["k"] = k;
      per_k.push_back(d);
    }
    std::vector<double> c, big_c, big_c_div;
    for (int k = 1; k <= n; ++k) c.push_back(k == n ? 0.0 : proj[static_cast<std::size_t>(k - 1)].divergence);
    double sum = 0.0;
    for (int k = 2; k <= n; ++k) {
      const auto i = static_cast<std::size_t>(k - 1);
      big_c.push_back(info(c[i - 1] - c[i]));
      big_c_div.push_back(info(relative_entropy(proj[i].pi, proj[i - 1].pi)));
      sum += c[i - 1] - c[i];
    }
    for (double& v : c) v = info(v);
    res = Json{{"c", c}, {"C", big_c}, {"C_by_divergence", big_c_div}, {"sum_C", info(sum)}};
    diag = Json{{"projections", per_k}, {"sum_C_minus_c1", info(sum) - c.front()}};
  }

  void multiinfo(Json& res, Json& diag) {
    const DensityMatrix rho = read_state(c_.state);
    std::vector<double> h;
    for (int i = 0; i < rho.shape().units(); ++i) h.push_back(info(von_neumann_entropy(marginal(rho, UnitSet::of({i})))));
    res = Json{{"I", info(multi_information(rho))}, {"H", info(von_neumann_entropy(rho))}, {"H_units", h}};
    diag = Json{{"method", "closed_form"}};
  }

  void dims(Json& res, Json& diag) {
    const SystemShape shape = detail::read_shape(c_);
    const Hypergraph u = detail::read_model_hypergraph(c_, shape.units());
    const ModelDims d = model_dim(shape, u);
    Json sets = Json::array();
    for (UnitSet v : u.sets()) sets.push_back(Json{{"set", detail::unit_set_json(v)}, {"dim", pure_factor_dim(shape, v)}});
    res = Json{{"shape", shape_to_json(shape)}, {"hypergraph", hypergraph_to_json(u)}, {"total", d.total},
               {"model", d.model}, {"sets", sets}};
    if (d.total <= 20000) {
      const HierarchicalModelSpec m = build_model(shape, u, BuildOptions{false, false});
      const GramCertificate cert = gram_certificate(m);
      res["basis_rank"] = cert.full_rank ? m.size() : 0;
      diag = Json{{"gram_max_offdiag", cert.max_offdiag},
                  {"gram_max_diag_error", cert.max_diag_error},
                  {"gershgorin_radius", cert.gershgorin_radius},
                  {"full_rank", cert.full_rank}};
    } else {
      diag = Json{{"notes", {"basis rank not certified: more than 20000 elements"}}};
    }
  }

  void basis(Json& res, Json& diag) {
    const UnitKind kind = parse_kind(c_.kind);
    if (c_.n < 1 || c_.n > 64) throw InvalidArgument("--n must be in [1, 64]");
    std::vector<CMatrix> b;
    Json labels = Json::array();
    if (kind == UnitKind::classical) {
      b = classical_unit_basis(c_.n);
    } else if (c_.hermitian) {
      b = unit_basis(c_.n, kind);
    } else {
      b = basis_E(c_.n);
      for (int k = 0; k < c_.n; ++k)
        for (int l = 0; l < c_.n; ++l) labels.push_back({k, l});
    }
    Json mats = Json::array();
    for (std::size_t i = 0; i < b.size(); ++i) {
      Json e{{"matrix", matrix_to_json(b[i])}};
      if (!labels.empty()) e["kl"] = labels[i];
      mats.push_back(e);
    }
    const auto m = static_cast<Eigen::Index>(b.size());
    res = Json{{"n", c_.n}, {"kind", to_string(kind)}, {"hermitian", kind == UnitKind::classical || c_.hermitian},
               {"elements", mats}};
    double herm = 0.0;
    for (const auto& e : b) herm = std::max(herm, hermitian_deviation(e));
    diag = Json{{"gram_deviation", (gram_matrix(b) - CMatrix::Identity(m, m)).cwiseAbs().maxCoeff()},
                {"max_hermitian_deviation", herm}};
  }

  std::vector<std::size_t> parse_support(const SystemShape& shape) const {
    std::vector<std::size_t> s;
    for (const auto& label : detail::split(c_.support)) s.push_back(parse_config(shape, label));
    if (s.empty()) throw InvalidArgument("--support: empty list");
    return s;
  }

  Json labels(const SystemShape& shape, const std::vector<std::size_t>& set) const {
    Json j = Json::array();
    for (std::size_t x : set) j.push_back(config_label(shape, x));
    return j;
  }

  void feasibility(Json& res, Json& diag) {
    RunConfig c = c_;
    c.kind = "classical";
    const SystemShape shape = detail::read_shape(c);
    if (c_.k < 1 || c_.k > shape.units()) throw InvalidArgument("--k must satisfy 1 <= k <= N");
    res = Json{{"shape", shape_to_json(shape)}, {"k", c_.k}};
    if (!c_.support.empty()) {
      const auto s = parse_support(shape);
      res["support"] = labels(shape, s);
      res["feasible"] = is_k_feasible(s, shape, c_.k);
    }
    if (c_.exhaustive) {
      const int max_size = c_.max_size > 0 ? c_.max_size : static_cast<int>(shape.dim());
      const FeasibilityReport rep = enumerate_feasibility(shape, c_.k, max_size);
      Json non = Json::array(), minimal = Json::array();
      for (const auto& s : rep.non_feasible) non.push_back(labels(shape, s));
      for (const auto& s : rep.minimal_non_feasible) minimal.push_back(labels(shape, s));
      res["exhaustive"] = Json{{"max_size", rep.max_size},
                               {"checked_by_size", rep.checked_by_size},
                               {"feasible_by_size", rep.feasible_by_size},
                               {"small_sets_feasible", rep.small_sets_feasible},
                               {"minimal_non_feasible", minimal},
                               {"non_feasible", non}};
    }
    if (c_.support.empty() && !c_.exhaustive) throw InvalidArgument("feasibility needs --support or --exhaustive");
    diag = Json{{"method", "exact combinatorial closure"}};
  }

  void toric(Json& res, Json& diag) {
    RunConfig c = c_;
    c.kind = "classical";
    const SystemShape shape = detail::read_shape(c);
    if (c_.k < 1 || c_.k > shape.units()) throw InvalidArgument("--k must satisfy 1 <= k <= N");
    const InteractionMatrix a = build_interaction_matrix(shape, c_.k);
    const std::vector<IVector> kernel = toric_kernel(a);
    Json kj = Json::array();
    for (const auto& v : kernel) kj.push_back(std::vector<std::int64_t>(v.data(), v.data() + v.size()));
    Json cols = Json::array();
    for (std::size_t x = 0; x < shape.dim(); ++x) cols.push_back(config_label(shape, x));
    res = Json{{"shape", shape_to_json(shape)}, {"k", c_.k}, {"columns", cols}, {"kernel_rank", kernel.size()},
               {"kernel", kj}};
    diag = Json::object();
    std::optional<RVector> s;
    if (!c_.support.empty()) s = uniform_on(parse_support(shape), shape.dim());
    if (!c_.state.empty()) {
      const DensityMatrix rho = read_state(c_.state);
      if (rho.shape().sizes() != shape.sizes()) throw ShapeMismatch("--state does not match --shape");
      s = rho.probabilities();
    }
    if (s) {
      const ToricCheck t = check_toric_membership(*s, kernel);
      res["member"] = t.member;
      res["zero_support"] = t.zero_support;
      diag = Json{{"residuals", t.residuals}, {"tolerance", 1e-9}};
    }
  }

  void maximize(Json& res, Json& diag) {
    const SystemShape shape = detail::read_shape(c_);
    const Hypergraph u = detail::read_model_hypergraph(c_, shape.units());
    const HierarchicalModelSpec model = build_model(shape, u);
    SearchOptions o;
    o.restarts = c_.restarts;
    o.seed = c_.seed;
    o.threads = c_.threads;
    o.projection = detail::projection_options(c_);
    const SearchSummary s = local_max_search(model, o);
    Json list = Json::array();
    for (const auto& m : s.maximizers) {
      Json j{{"divergence", info(m.divergence)},
             {"rank", m.rank},
             {"bound", m.bound},
             {"bound_satisfied", m.bound_satisfied},
             {"exp_form_residual", m.exp_form_residual},
             {"multiplicity", m.multiplicity},
             {"first_restart", m.first_restart},
             {"state", state_to_json(m.state)}};
      if (m.support_size >= 0) j["support_size"] = m.support_size;
      list.push_back(j);
    }
    res = Json{{"shape", shape_to_json(shape)}, {"hypergraph", hypergraph_to_json(u)}, {"bound", s.bound},
               {"bound_is_extension", s.bound_is_extension}, {"maximizers", list}};
    diag = Json{{"restarts", s.restarts},
                {"converged", s.converged},
                {"failed", s.failed},
                {"max_objective_drop", s.max_objective_drop},
                {"dedup_tol", o.dedup_tol},
                {"notes", s.notes}};
    if (s.maximizers.empty()) throw Unconverged{res, diag};
  }

  void bell(Json& res, Json& diag) {
    if (c_.t.empty() == c_.lambda.empty()) throw InvalidArgument("give exactly one of --t and --lambda");
    BellDiagonal b;
    if (!c_.t.empty()) {
      const auto v = detail::parse_doubles(c_.t, 3, "--t");
      b = bell_from_t(Vec3(v[0], v[1], v[2]));
    } else {
      const auto v = detail::parse_doubles(c_.lambda, 4, "--lambda");
      b = bell_from_lambda(Vec4(v[0], v[1], v[2], v[3]));
    }
    const SeparabilityCheck sep = separability(b);
    const ClassicalCorrelation cc = is_classically_correlated_bd(b);
    res = Json{{"t", {b.t(0), b.t(1), b.t(2)}},
               {"lambda", {b.lambda(0), b.lambda(1), b.lambda(2), b.lambda(3)}},
               {"separable", sep.separable},
               {"separable_by_t", sep.by_t},
               {"mutual_information", info(mutual_information_bd(b))},
               {"classically_correlated", cc.classical},
               {"matrix", matrix_to_json(bell_matrix(b.t))}};
    if (cc.classical) res["witness_basis"] = matrix_to_json(cc.witness);
    diag = Json{{"criteria_agree", sep.agree}, {"witness_off_diagonal", cc.off_diagonal}, {"tolerance", 1e-12}};
  }

  void theorem1(Json& res, Json& diag) {
    if (c_.samples < 1) throw InvalidArgument("--samples must be >= 1");
    const SeparableBoundReport r = verify_theorem1(c_.samples, c_.seed);
    Json verts = Json::array();
    for (const auto& v : r.vertices)
      verts.push_back(Json{{"bell_pair", {v.vertex.i, v.vertex.j}},
                           {"t", {v.vertex.state.t(0), v.vertex.state.t(1), v.vertex.state.t(2)}},
                           {"mutual_information", info(v.mutual_information)},
                           {"product_form", v.vertex.product.label},
                           {"product_form_error", v.product_form_error},
                           {"classically_correlated", v.classical},
                           {"local_unitary_error", v.local_unitary_error}});
    res = Json{{"samples", r.samples},
               {"bound", info(std::numbers::ln2)},
               {"max_sampled_I", info(r.max_sampled_I)},
               {"argmax_t", {r.argmax_t(0), r.argmax_t(1), r.argmax_t(2)}},
               {"violations", r.violations},
               {"bound_satisfied", r.violations == 0},
               {"maximizers", verts},
               {"passed", r.passed}};
    diag = Json{{"criteria_disagreements", r.criteria_disagreements}, {"tolerance", 1e-9}};
  }

  void fig1(Json& res, Json& diag) {
    if (c_.grid < 1 || c_.grid > 200) throw InvalidArgument("--grid must be in [1, 200]");
    const auto points = fig1_geometry(c_.grid);
    int tetra = 0, octa = 0, physical = 0, separable = 0, products = 0;
    for (const auto& p : points) {
      tetra += p.kind == "tetrahedron";
      octa += p.kind == "octahedron";
      if (p.kind != "grid") {
        products += p.product;
        continue;
      }
      physical += p.physical;
      separable += p.separable;
    }
    if (!c_.out.empty()) write_text(c_.out, fig1_csv(points));
    res = Json{{"csv", c_.out.empty() ? Json(nullptr) : Json(c_.out)},
               {"tetrahedron_vertices", tetra},
               {"octahedron_vertices", octa},
               {"product_points", products},
               {"grid_points", points.size() - static_cast<std::size_t>(tetra + octa + 1)},
               {"grid_physical", physical},
               {"grid_separable", separable}};
    diag = Json{{"tolerance", 1e-12}};
  }

  void demo(Json& res, Json& diag) {
    acceptance::Settings s;
    s.seed = c_.seed;
    s.projection = detail::projection_options(c_);
    Json rows = Json::array();
    Json failed = Json::array();
    for (const auto& o : acceptance::run_all(s)) {
      rows.push_back(Json{{"id", o.id}, {"name", o.name}, {"passed", o.passed}, {"detail", o.detail}});
      if (!o.passed) failed.push_back(o.id);
    }
    demo_failed_ = !failed.empty();
    const bool standard = c_.tol == kDefaultTol && c_.boundary_tol == ProjectionOptions{}.boundary_tol &&
                          c_.method == "auto";
    res = Json{{"criteria", rows}, {"failed", failed}, {"all_passed", failed.empty()}};
    diag = Json{{"standard_config", standard}};
    if (!standard) diag["warnings"] = {"non-standard solver configuration: results are not the reference run"};
  }

  RunConfig c_;
  double scale_;
  bool demo_failed_ = false;
};

inline Json config_json(const RunConfig& c) {
  Json j{{"seed", c.seed}, {"tol", c.tol}, {"boundary_tol", c.boundary_tol}, {"method", c.method},
         {"units", c.bits ? "bits" : "nats"}};
  auto put = [&](const char* key, const std::string& v) {
    if (!v.empty()) j[key] = v;
  };
  put("state", c.state);
  put("hypergraph", c.hypergraph);
  put("shape", c.shape);
  put("support", c.support);
  put("t", c.t);
  put("lambda", c.lambda);
  put("out", c.out);
  if (c.k > 0) j["k"] = c.k;
  const std::string& cmd = c.command;
  if (cmd == "dims" || cmd == "basis" || cmd == "maximize") j["kind"] = c.kind;
  if (cmd == "basis") {
    j["n"] = c.n;
    j["hermitian"] = c.hermitian;
  }
  if (cmd == "feasibility") {
    j["exhaustive"] = c.exhaustive;
    if (c.max_size > 0) j["max_size"] = c.max_size;
  }
  if (cmd == "maximize") j["restarts"] = c.restarts;
  if (cmd == "theorem1") j["samples"] = c.samples;
  if (cmd == "fig1") j["grid"] = c.grid;
  return j;
}

inline void emit(const RunConfig& c, const Json& report, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (!c.out.empty() && c.command != "fig1") write_text(c.out, text);
  else out << text;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig c;
  CLI::App app{"Correlation measures from maximum-entropy projections onto hierarchical models"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every command");

  auto common = [&c](CLI::App* s) {
    s->add_option("--seed", c.seed, "Random seed")->capture_default_str();
    s->add_option("--tol", c.tol, "Constraint tolerance for interior projections")->capture_default_str();
    s->add_option("--boundary-tol", c.boundary_tol, "Constraint tolerance for boundary projections")
        ->capture_default_str();
    s->add_option("--method", c.method, "Projection method: auto, dual, primal, ipf")->capture_default_str();
    s->add_flag("--bits", c.bits, "Report information quantities in bits instead of nats");
    s->add_option("--out", c.out, "Write the report to this file");
  };
  auto model = [&c](CLI::App* s) {
    s->add_option("--hypergraph", c.hypergraph, "Hypergraph JSON file");
    s->add_option("--k", c.k, "Use U_k, all unit sets of size <= k");
  };
  auto shape = [&c](CLI::App* s) {
    s->add_option("--shape", c.shape, "Unit sizes '2,2,2' or a shape JSON file")->required();
    s->add_option("--kind", c.kind, "Unit kind for size lists: quantum or classical")->capture_default_str();
  };

  auto* project = app.add_subcommand("project", "Project a state onto a hierarchical model");
  common(project);
  model(project);
  project->add_option("--state", c.state, "State JSON file")->required();

  auto* ck = app.add_subcommand("ck", "Correlation c_k: divergence from U_k");
  common(ck);
  ck->add_option("--state", c.state, "State JSON file")->required();
  ck->add_option("--k", c.k, "Interaction order")->required();

  auto* dec = app.add_subcommand("decompose", "c_1..c_N and irreducible correlations C_2..C_N");
  common(dec);
  dec->add_option("--state", c.state, "State JSON file")->required();

  auto* mi = app.add_subcommand("multiinfo", "Multi-information sum_i H(rho_i) - H(rho)");
  common(mi);
  mi->add_option("--state", c.state, "State JSON file")->required();

  auto* dims = app.add_subcommand("dims", "Dimension of a hierarchical model");
  common(dims);
  shape(dims);
  model(dims);

  auto* basis = app.add_subcommand("basis", "Orthonormal single-unit basis");
  common(basis);
  basis->add_option("--n", c.n, "Unit size")->capture_default_str();
  basis->add_option("--kind", c.kind, "quantum or classical")->capture_default_str();
  basis->add_flag("--hermitian", c.hermitian, "Self-adjoint version of the quantum basis");

  auto* feas = app.add_subcommand("feasibility", "k-feasibility of supports (classical units)");
  common(feas);
  feas->add_option("--shape", c.shape, "Unit sizes '2,2,2' or a shape JSON file")->required();
  feas->add_option("--k", c.k, "Interaction order")->required();
  feas->add_flag("--exhaustive", c.exhaustive, "Classify every subset up to --max-size");
  feas->add_option("--max-size", c.max_size, "Largest subset size for --exhaustive (default: all)");
  feas->add_option("--support", c.support, "Configurations to test, e.g. 100,010,001");

  auto* toric = app.add_subcommand("toric", "Integer kernel of the interaction matrix");
  common(toric);
  toric->add_option("--shape", c.shape, "Unit sizes '2,2,2' or a shape JSON file")->required();
  toric->add_option("--k", c.k, "Interaction order")->required();
  toric->add_option("--support", c.support, "Test the uniform distribution on these configurations");
  toric->add_option("--state", c.state, "Test a classical state's probabilities");

  auto* maxim = app.add_subcommand("maximize", "Multi-start search for local maximizers of the divergence");
  common(maxim);
  shape(maxim);
  model(maxim);
  maxim->add_option("--restarts", c.restarts, "Number of restarts")->capture_default_str();
  maxim->add_option("--threads", c.threads, "Worker threads (0: HMDIV_THREADS or 1)")->capture_default_str();

  auto* bell = app.add_subcommand("bell", "Bell-diagonal two-qubit state");
  common(bell);
  bell->add_option("--t", c.t, "Correlation vector t1,t2,t3");
  bell->add_option("--lambda", c.lambda, "Bell-basis eigenvalues l1,l2,l3,l4");

  auto* th1 = app.add_subcommand("theorem1", "Mutual information bound for separable Bell-diagonal states");
  common(th1);
  th1->add_option("--samples", c.samples, "Number of random separable states")->capture_default_str();

  auto* fig = app.add_subcommand("fig1", "Bell-diagonal geometry as CSV");
  common(fig);
  fig->add_option("--grid", c.grid, "Grid intervals per axis")->capture_default_str();

  auto* demo = app.add_subcommand("demo", "Run every acceptance criterion");
  common(demo);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  c.command = app.get_subcommands().front()->get_name();

  const auto start = std::chrono::steady_clock::now();
  Json report{{"command", c.command}, {"config", config_json(c)}, {"units", c.bits ? "bits" : "nats"}};
  Json results = Json::object(), diagnostics = Json::object();
  int code = 0;
  Runner runner(c);
  try {
    runner.dispatch(results, diagnostics);
    if (runner.demo_failed()) code = 1;
  } catch (const Unconverged& u) {
    results = u.results;
    diagnostics = u.diagnostics;
    diagnostics["error"] = "did not converge";
    code = 3;
  } catch (const ConvergenceError& e) {
    diagnostics["error"] = e.what();
    code = 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  report["results"] = results;
  report["diagnostics"] = diagnostics;
  report["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    emit(c, report, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  if (code == 3) err << "error: computation did not converge\n";
  if (code == 1) err << "error: acceptance criteria failed: " << results["failed"].dump() << "\n";
  return code;
}

}  // namespace hmdiv::cli
