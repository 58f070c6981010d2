#include "cli.hpp"

#include "entineq/datum.hpp"
#include "entineq/entropy.hpp"
#include "entineq/extremal.hpp"
#include "entineq/gaussopt.hpp"
#include "entineq/io.hpp"
#include "entineq/mixture.hpp"
#include "entineq/structure.hpp"

#include <CLI11.hpp>

#include <optional>
#include <ostream>
#include <sstream>

namespace entineq::cli {

namespace {

using io::json;

struct Options {
  std::string datum_path;
  std::string dist_path;
  std::string sigma_path;
  std::string out_path;
  std::string report_path;
  std::string format = "json";
  double tol = 1e-10;
  std::size_t max_iter = 10000;
  double damping = 0.5;
  std::size_t trials = 10000;
  std::size_t samples = 200000;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::optional<double> cg;
};

/// Thrown for conditions that map to an exit code.
struct Abort {
  int code;
  std::string message;
};

struct Input {
  std::string bytes;
  json doc;
};

Input load(const std::string& path) {
  Input in;
  in.bytes = io::read_file(path);
  in.doc = io::parse_json(in.bytes);
  return in;
}

SolverSettings solver_settings(const Options& o) {
  if (!(o.damping > 0.0 && o.damping <= 1.0)) throw Abort{input_error, "--damping must lie in (0, 1]"};
  if (!(o.tol > 0.0)) throw Abort{input_error, "--tol must be positive"};
  return SolverSettings{o.tol, o.max_iter, o.damping};
}

void require_seed(const Options& o, const char* why) {
  if (!o.has_seed) throw Abort{input_error, std::string("--seed is required for ") + why};
}

void require_valid_datum(const Datum& d) {
  const auto problems = validate(d);
  if (problems.empty()) return;
  std::string msg = "invalid datum:";
  for (const auto& p : problems) msg += " " + p + ";";
  throw Abort{input_error, msg};
}

json solver_echo(const Options& o) {
  return json{{"tol", o.tol}, {"max_iter", o.max_iter}, {"damping", o.damping}};
}

struct Outcome {
  json settings = json::object();
  json results = json::object();
  json inputs = json::object();
  std::string status = "ok";
  int code = ok;
};

Outcome cmd_validate(const Options& o) {
  Outcome r;
  const Input in = load(o.datum_path);
  r.inputs["datum"] = io::sha256_hex(in.bytes);
  const Datum d = io::datum_from_json(in.doc);
  const auto problems = validate(d);
  r.results["valid"] = problems.empty();
  r.results["violations"] = problems;
  r.settings["trials"] = o.trials;
  if (!problems.empty()) return r;
  require_seed(o, "the sampled dimension check");
  r.settings["seed"] = o.seed;
  const ScalingCheck sc = scaling_check(d);
  r.results["scaling"] = json{{"holds", sc.holds}, {"defect", io::number(sc.defect)}};
  r.results["dimension"] = io::dimension_check_to_json(dimension_check_sampled(d, o.trials, o.seed));
  r.results["geometric"] = io::geometric_check_to_json(is_geometric(d));
  return r;
}

Outcome cmd_constant(const Options& o) {
  Outcome r;
  const Input in = load(o.datum_path);
  r.inputs["datum"] = io::sha256_hex(in.bytes);
  const Datum d = io::datum_from_json(in.doc);
  require_valid_datum(d);
  require_seed(o, "the sampled dimension check");
  ConstantSettings cs{solver_settings(o), o.trials, o.seed};
  r.settings = solver_echo(o);
  r.settings["trials"] = o.trials;
  r.settings["seed"] = o.seed;
  r.results = io::best_constant_to_json(best_constant(d, cs));
  return r;
}

/// Solves and geometrizes; throws Abort(3) when no certificate exists.
Geometrization certify(const Datum& d, const SolverSettings& settings, json& solve_out) {
  const SolveResult solve = fixed_point_solve(d, settings);
  solve_out = io::solve_to_json(solve);
  if (solve.status != SolveStatus::converged)
    throw Abort{precondition_unmet, std::string("fixed-point solver ") + to_string(solve.status) +
                                        "; no extremizing covariance to geometrize with"};
  try {
    return geometrize(d, solve.k);
  } catch (const PreconditionError& e) {
    throw Abort{precondition_unmet, e.what()};
  } catch (const SingularPushforward& e) {
    throw Abort{precondition_unmet, e.what()};
  }
}

Outcome cmd_geometrize(const Options& o) {
  Outcome r;
  const Input in = load(o.datum_path);
  r.inputs["datum"] = io::sha256_hex(in.bytes);
  const Datum d = io::datum_from_json(in.doc);
  require_valid_datum(d);
  r.settings = solver_echo(o);
  json solve;
  Geometrization g;
  try {
    g = certify(d, solver_settings(o), solve);
  } catch (const Abort& a) {
    if (a.code != precondition_unmet) throw;
    r.results["solve"] = solve;
    r.results["error"] = a.message;
    r.status = "precondition-unmet";
    r.code = precondition_unmet;
    return r;
  }
  const json doc = io::datum_to_json(g.datum);
  const std::string text = doc.dump(2) + "\n";
  // Re-validate what a consumer of the written document would read.
  const Datum reread = io::datum_from_json(io::parse_json(text));
  r.results["solve"] = solve;
  r.results["datum"] = doc;
  json a = json::array(), c = json::array();
  for (const auto& m : g.a) a.push_back(io::matrix_to_json(m.matrix()));
  for (const auto& m : g.c) c.push_back(io::matrix_to_json(m.matrix()));
  r.results["transforms"] = json{{"A", a}, {"C", c}};
  r.results["geometric_check"] = io::geometric_check_to_json(is_geometric(reread, 1e-6));
  if (!o.out_path.empty()) io::write_file_atomic(o.out_path, text);
  return r;
}

Outcome cmd_structure(const Options& o) {
  Outcome r;
  const Input in = load(o.datum_path);
  r.inputs["datum"] = io::sha256_hex(in.bytes);
  Datum d = io::datum_from_json(in.doc);
  require_valid_datum(d);
  r.settings = solver_echo(o);
  if (!is_geometric(d, 1e-6).geometric) {
    json solve;
    try {
      d = certify(d, solver_settings(o), solve).datum;
    } catch (const Abort& a) {
      if (a.code != precondition_unmet) throw;
      r.results["solve"] = solve;
      r.results["error"] = "geometrization failed: " + a.message;
      r.status = "precondition-unmet";
      r.code = precondition_unmet;
      return r;
    }
    r.results["notice"] = "input is not geometric; the report describes the geometrized datum";
    r.results["geometrized_datum"] = io::datum_to_json(d);
    r.results["solve"] = solve;
  }
  std::optional<SymMat> sigma;
  if (!o.sigma_path.empty()) {
    const Input s = load(o.sigma_path);
    r.inputs["sigma"] = io::sha256_hex(s.bytes);
    sigma = io::sigma_from_json(s.doc, d.total_dim());
  }
  StructureReport report;
  try {
    report = extremizer_report(d, sigma);
  } catch (const DecompositionError& e) {
    if (!sigma) throw;
    r.results["sigma_rejected"] = e.what();
    report = extremizer_report(d);
  }
  r.results["report"] = io::structure_to_json(report);
  r.results["target_decomposition"] = io::target_check_to_json(verify_target_decomposition(d, report));
  return r;
}

Outcome cmd_verify(const Options& o) {
  Outcome r;
  const Input din = load(o.datum_path);
  const Input pin = load(o.dist_path);
  r.inputs["datum"] = io::sha256_hex(din.bytes);
  r.inputs["distribution"] = io::sha256_hex(pin.bytes);
  const Datum d = io::datum_from_json(din.doc);
  require_valid_datum(d);
  const ProductDistribution dist = io::distribution_from_json(pin.doc);
  try {
    dist.check_conforms(d);
  } catch (const std::invalid_argument& e) {
    throw Abort{input_error, std::string("factors: ") + e.what()};
  }
  require_seed(o, "Monte Carlo estimation");
  const McSettings mc{o.samples, 20, o.seed};
  r.settings = json{{"samples", o.samples}, {"batches", mc.batches}, {"seed", o.seed}};

  const bool geometric = is_geometric(d, 1e-6).geometric;
  double cg = 0.0;
  std::string source;
  if (o.cg) {
    cg = *o.cg;
    source = "flag";
  } else if (geometric) {
    source = "geometric";
  } else {
    r.settings["solver"] = solver_echo(o);
    r.settings["trials"] = o.trials;
    const BestConstant bc = best_constant(d, ConstantSettings{solver_settings(o), o.trials, o.seed});
    if (bc.kind != BestConstant::Kind::finite) {
      r.results["constant"] = io::best_constant_to_json(bc);
      r.results["error"] = "C_g is not available; pass --cg";
      r.status = "precondition-unmet";
      r.code = precondition_unmet;
      return r;
    }
    cg = bc.value;
    source = "solver";
  }
  r.settings["cg"] = io::number(cg);
  r.results["cg"] = json{{"value", io::number(cg)}, {"source", source}};
  try {
    r.results["deficit"] = io::deficit_to_json(entropy_deficit(d, dist, cg, mc));
    if (geometric) {
      const StructureReport report = extremizer_report(d);
      r.results["extremality"] = io::extremal_to_json(check_extremal_distribution(d, dist, report, mc));
    }
  } catch (const ComponentCapExceeded& e) {
    r.results["error"] = e.what();
    r.status = "component-cap-exceeded";
  } catch (const SingularPushforward& e) {
    r.results["error"] = e.what();
    r.status = "precondition-unmet";
    r.code = precondition_unmet;
  }
  return r;
}

void add_solver_flags(CLI::App* sub, Options& o) {
  sub->add_option("--tol", o.tol, "fixed-point tolerance")->capture_default_str();
  sub->add_option("--max-iter", o.max_iter, "fixed-point iteration cap")->capture_default_str();
  sub->add_option("--damping", o.damping, "initial damping in (0, 1]")->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  double cg_value = 0.0;
  CLI::App app{"Entropy-inequality data: finiteness, sharp Gaussian constant, geometrization and extremizers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(io::kToolVersion));
  app.add_option("--format", o.format, "report flavor: json (indented) or compact")
      ->check(CLI::IsMember({"json", "compact"}))
      ->capture_default_str();
  app.add_option("--report", o.report_path, "write the report here instead of stdout");
  CLI::Option* seed_opt = app.add_option("--seed", o.seed, "seed for randomized checks");

  auto* v = app.add_subcommand("validate", "validity, scaling and sampled dimension checks");
  v->add_option("datum", o.datum_path, "datum document")->required();
  v->add_option("--trials", o.trials, "random subspaces for the dimension falsifier")->capture_default_str();

  auto* c = app.add_subcommand("constant", "sharp Gaussian constant");
  c->add_option("datum", o.datum_path, "datum document")->required();
  c->add_option("--trials", o.trials, "random subspaces for the dimension falsifier")->capture_default_str();
  add_solver_flags(c, o);

  auto* g = app.add_subcommand("geometrize", "transform to an equivalent geometric datum");
  g->add_option("datum", o.datum_path, "datum document")->required();
  g->add_option("--out", o.out_path, "write the geometric datum document here");
  add_solver_flags(g, o);

  auto* s = app.add_subcommand("structure", "independent subspaces, K_dep and critical decomposition");
  s->add_option("datum", o.datum_path, "datum document")->required();
  s->add_option("--sigma", o.sigma_path, "covariance (N x N) inducing the critical decomposition");
  add_solver_flags(s, o);

  auto* f = app.add_subcommand("verify", "entropy deficit of a product distribution");
  f->add_option("datum", o.datum_path, "datum document")->required();
  f->add_option("distribution", o.dist_path, "distribution document")->required();
  CLI::Option* cg_opt = f->add_option("--cg", cg_value, "sharp constant (default: 0 for geometric data, else solved)");
  f->add_option("--samples", o.samples, "Monte Carlo samples")->capture_default_str();
  f->add_option("--trials", o.trials, "random subspaces for the dimension falsifier")->capture_default_str();
  add_solver_flags(f, o);

  // Subcommands accept the global flags after their own arguments too.
  for (auto* sub : {v, c, g, s, f}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : input_error;
  }
  o.has_seed = seed_opt->count() > 0;
  if (cg_opt->count() > 0) o.cg = cg_value;

  std::string command;
  Outcome result;
  try {
    if (v->parsed()) {
      command = "validate";
      result = cmd_validate(o);
    } else if (c->parsed()) {
      command = "constant";
      result = cmd_constant(o);
    } else if (g->parsed()) {
      command = "geometrize";
      result = cmd_geometrize(o);
    } else if (s->parsed()) {
      command = "structure";
      result = cmd_structure(o);
    } else {
      command = "verify";
      result = cmd_verify(o);
    }
  } catch (const io::ParseError& e) {
    err << "entineq: input error: " << e.what() << "\n";
    return input_error;
  } catch (const Abort& a) {
    err << "entineq: " << (a.code == input_error ? "input error: " : "") << a.message << "\n";
    return a.code;
  } catch (const std::exception& e) {
    err << "entineq: error: " << e.what() << "\n";
    return input_error;
  }

  json doc;
  doc["schema_version"] = io::kSchemaVersion;
  doc["tool"] = json{{"name", io::kToolName}, {"version", io::kToolVersion}};
  doc["command"] = command;
  doc["input_digest"] = result.inputs;
  doc["settings"] = result.settings;
  doc["results"] = result.results;
  doc["status"] = result.status;
  const std::string text = (o.format == "compact" ? doc.dump() : doc.dump(2)) + "\n";
  try {
    if (o.report_path.empty())
      out << text;
    else
      io::write_file_atomic(o.report_path, text);
  } catch (const std::exception& e) {
    err << "entineq: error: " << e.what() << "\n";
    return input_error;
  }
  if (result.code == precondition_unmet && result.results.contains("error"))
    err << "entineq: " << result.results["error"].get<std::string>() << "\n";
  return result.code;
}

}  // namespace entineq::cli
