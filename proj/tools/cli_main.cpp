// Command-line front end: Lyapunov exponents, expansion coefficients,
// topological pressure, Hausdorff dimension, coded periodic orbits, Julia
// point clouds and the verification suite, with JSON or CSV output.

#include <climits>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "juliadyn/brackets.hpp"
#include "juliadyn/coding.hpp"
#include "juliadyn/common.hpp"
#include "juliadyn/conjugacy.hpp"
#include "juliadyn/lyapunov.hpp"
#include "juliadyn/poly.hpp"
#include "juliadyn/thermo.hpp"
#include "juliadyn/verify_suite.hpp"

#include "svg_scatter.hpp"

namespace {

using juliadyn::cplx;
using ordered_json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------- parsing ---

cplx parse_complex(const std::string& text) {
  std::istringstream in(text);
  double re = 0.0, im = 0.0;
  char comma = 0;
  if (!(in >> re)) juliadyn::fail(juliadyn::ErrorCode::InvalidInput,
                                  "cannot parse complex value '" + text + "'");
  if (in >> comma) {
    if (comma != ',' || !(in >> im))
      juliadyn::fail(juliadyn::ErrorCode::InvalidInput,
                     "complex values are written re,im: '" + text + "'");
  }
  std::string rest;
  if (in >> rest)
    juliadyn::fail(juliadyn::ErrorCode::InvalidInput,
                   "trailing characters in complex value '" + text + "'");
  return {re, im};
}

std::vector<double> parse_weight_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      juliadyn::fail(juliadyn::ErrorCode::InvalidInput,
                     "cannot parse weight '" + item + "'");
    }
  }
  return out;
}

// ----------------------------------------------------------- shared state ---

struct CommonOpts {
  std::string family = "quad";
  std::string c_text = "0,0";
  std::string a1_text = "0,0";
  std::string a0_text = "0,0";
  std::string weights_text;
  int order = 0;  // 0: family default
  int level = 0;  // 0: family default
  std::uint64_t seed = 1;
  std::string out_path;
  std::string format = "json";
  std::string svg_path;
};

juliadyn::Family family_of(const CommonOpts& o) {
  if (o.family == "quad" || o.family == "quadratic")
    return juliadyn::Family::Quadratic;
  if (o.family == "cubic") return juliadyn::Family::Cubic;
  juliadyn::fail(juliadyn::ErrorCode::InvalidInput,
                 "unknown family '" + o.family + "' (quad|cubic)");
}

std::vector<cplx> params_of(const CommonOpts& o) {
  if (family_of(o) == juliadyn::Family::Quadratic)
    return {parse_complex(o.c_text)};
  return {parse_complex(o.a1_text), parse_complex(o.a0_text)};
}

juliadyn::BernoulliWeights weights_of(const CommonOpts& o, int alphabet) {
  if (o.weights_text.empty()) return juliadyn::BernoulliWeights::uniform(alphabet);
  auto values = parse_weight_list(o.weights_text);
  auto w = juliadyn::BernoulliWeights::of(values);
  juliadyn::require(w.alphabet() == alphabet, juliadyn::ErrorCode::AlphabetMismatch,
                    "weight vector length must equal the polynomial degree");
  return w;
}

juliadyn::LyapunovEngine make_engine(const CommonOpts& o) {
  juliadyn::SeriesConfig config;
  config.family = family_of(o);
  config.order_total = o.order;
  return juliadyn::LyapunovEngine(config.family, config, o.level);
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_svg = false) {
  cmd->add_option("--family", o.family, "Polynomial family: quad or cubic")
      ->capture_default_str();
  cmd->add_option("--c", o.c_text, "Quadratic parameter c as re,im")
      ->capture_default_str();
  cmd->add_option("--a1", o.a1_text, "Cubic linear coefficient a1 as re,im")
      ->capture_default_str();
  cmd->add_option("--a0", o.a0_text, "Cubic constant coefficient a0 as re,im")
      ->capture_default_str();
  cmd->add_option("--weights", o.weights_text,
                  "Bernoulli weights p1,...,pd (default: equidistributed)");
  cmd->add_option("--order", o.order,
                  "Total series order (0: family default 6/4)");
  cmd->add_option("--level", o.level,
                  "Cylinder table depth bound (0: family default 18/12)");
  cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  cmd->add_option("--out", o.out_path, "Write the document to this file");
  cmd->add_option("--format", o.format, "Output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  if (with_svg)
    cmd->add_option("--svg", o.svg_path, "Also write an SVG scatter plot");
}

// ---------------------------------------------------------------- output ----

ordered_json complex_json(cplx z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json params_json(const CommonOpts& o, const std::vector<cplx>& params) {
  ordered_json j;
  if (family_of(o) == juliadyn::Family::Quadratic) {
    j["c"] = complex_json(params[0]);
  } else {
    j["a1"] = complex_json(params[0]);
    j["a0"] = complex_json(params[1]);
  }
  return j;
}

ordered_json document_head(const std::string& command, const CommonOpts& o,
                           const std::vector<cplx>& params) {
  ordered_json doc;
  doc["command"] = command;
  doc["version"] = kVersion;
  doc["family"] = family_of(o) == juliadyn::Family::Quadratic ? "quadratic" : "cubic";
  doc["params"] = params_json(o, params);
  return doc;
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void emit(const CommonOpts& o, const ordered_json& doc, const std::string& csv) {
  std::string body = o.format == "csv" ? csv : doc.dump(2) + "\n";
  if (o.out_path.empty()) {
    std::fwrite(body.data(), 1, body.size(), stdout);
  } else {
    std::ofstream f(o.out_path, std::ios::binary);
    if (!f) juliadyn::fail(juliadyn::ErrorCode::InvalidInput,
                           "cannot open output file " + o.out_path);
    f << body;
  }
}

ordered_json estimate_json(const juliadyn::LyapunovEstimate& est) {
  ordered_json j;
  j["value"] = est.value;
  j["error_estimate"] = est.error_estimate;
  j["positive_exponent"] = est.positive_exponent;
  j["method"] = juliadyn::lyap_method_name(est.method);
  if (est.quadrature_level > 0) j["quadrature_level"] = est.quadrature_level;
  return j;
}

ordered_json poly_json(const juliadyn::RealParamPolynomial& p) {
  ordered_json j = ordered_json::object();
  for (const auto& [expo, value] : p.terms) j[p.monomial_name(expo)] = value;
  return j;
}

// ------------------------------------------------------------ subcommands ---

struct LyapOpts {
  std::string method = "conjugacy";
  std::string mode = "exact";
  int symbol = 1;
  int chains = 64;
  int steps = 20000;
  int burn = 1000;
};

int run_lyap(const CommonOpts& common, const LyapOpts& opt) {
  auto engine = make_engine(common);
  auto params = params_of(common);
  juliadyn::ExpansionMode mode = opt.mode == "first-order"
                                     ? juliadyn::ExpansionMode::FirstOrder
                                     : juliadyn::ExpansionMode::Exact;

  juliadyn::LyapunovEstimate est;
  ordered_json extra = ordered_json::object();
  if (opt.method == "conjugacy") {
    auto w = weights_of(common, engine.degree());
    est = engine.conjugacy_quadrature(params, w, mode);
  } else if (opt.method == "expansion") {
    auto w = weights_of(common, engine.degree());
    if (engine.family() == juliadyn::Family::Quadratic) {
      est = engine.expansion_value_quadratic(params[0], w);
    } else {
      auto terms = engine.expansion_terms_cubic(params[0], params[1], w);
      est.value = terms.total;
      est.error_estimate = terms.error_estimate;
      est.method = juliadyn::LyapMethod::TruncatedExpansion;
      est.positive_exponent = -terms.total;
      for (const auto& [label, value] : terms.group_integrals)
        extra[label] = value;
    }
  } else if (opt.method == "mc") {
    auto w = weights_of(common, engine.degree());
    juliadyn::McOptions mc;
    mc.n_chains = opt.chains;
    mc.orbit_length = opt.steps;
    mc.burn_in = opt.burn;
    mc.seed = common.seed;
    est = engine.birkhoff_mc(params, w, mc);
  } else if (opt.method == "dirac") {
    est = engine.dirac_closed_form(params, opt.symbol);
  } else {
    juliadyn::fail(juliadyn::ErrorCode::InvalidInput,
                   "unknown method '" + opt.method +
                       "' (conjugacy|expansion|mc|dirac)");
  }

  auto doc = document_head("lyap", common, params);
  if (opt.method != "dirac") {
    auto w = weights_of(common, engine.degree());
    doc["weights"] = w.p;
  } else {
    doc["dirac_symbol"] = opt.symbol;
  }
  doc["mode"] = juliadyn::expansion_mode_name(mode);
  doc["result"] = estimate_json(est);
  if (!extra.empty()) doc["result"]["group_integrals"] = extra;
  doc["config"] = {{"order", engine.conjugacy().config().resolved_order()},
                   {"table_level", engine.table_level()},
                   {"seed", common.seed}};

  std::string csv = "family,method,mode,value,error_estimate\n";
  csv += doc["family"].get<std::string>() + "," +
         std::string(juliadyn::lyap_method_name(est.method)) + "," +
         std::string(juliadyn::expansion_mode_name(mode)) + "," +
         csv_number(est.value) + "," + csv_number(est.error_estimate) + "\n";
  emit(common, doc, csv);
  return 0;
}

struct ExpandOpts {
  std::string measure = "dirac";
  std::string mode = "first-order";
  int symbol = 1;
  double radius = 0.02;
  bool strict = false;
  bool with_gaps = false;
};

int run_expand(const CommonOpts& common, const ExpandOpts& opt) {
  auto engine = make_engine(common);
  juliadyn::MeasureSpec measure =
      opt.measure == "fixed"
          ? juliadyn::MeasureSpec::fixed(weights_of(common, engine.degree()))
          : juliadyn::MeasureSpec::dirac(engine.degree(), opt.symbol);
  juliadyn::ExpansionMode mode = opt.mode == "exact"
                                     ? juliadyn::ExpansionMode::Exact
                                     : juliadyn::ExpansionMode::FirstOrder;

  auto report = engine.extract_coefficients(measure, mode, opt.radius);

  ordered_json doc;
  doc["command"] = "expand";
  doc["version"] = kVersion;
  doc["family"] =
      engine.family() == juliadyn::Family::Quadratic ? "quadratic" : "cubic";
  doc["measure"] = opt.measure == "fixed"
                       ? ordered_json{{"kind", "fixed"}, {"weights", measure.weights.p}}
                       : ordered_json{{"kind", "dirac-limit"},
                                      {"symbol", measure.dirac_symbol}};
  doc["mode"] = juliadyn::expansion_mode_name(mode);
  doc["fit_radius"] = report.fit_radius;

  ordered_json rows = ordered_json::array();
  for (const auto& row : report.rows) {
    ordered_json r;
    r["monomial"] = row.monomial;
    r["expo"] = row.expo;
    r["pointwise"] = row.pointwise;
    r["fit"] = row.fit;
    r["reference"] = row.reference ? ordered_json(*row.reference) : ordered_json();
    r["strategy_gap_rel"] = row.strategy_gap_rel;
    r["reference_gap_rel"] =
        row.reference_gap_rel ? ordered_json(*row.reference_gap_rel) : ordered_json();
    r["status"] = row.status;
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  doc["polynomials"] = {{"pointwise", poly_json(report.pointwise_poly)},
                        {"fit", poly_json(report.fit_poly)}};
  if (report.reference_poly)
    doc["polynomials"]["reference"] = poly_json(*report.reference_poly);
  doc["diagnostics"] = {{"fit_condition", report.fit_condition},
                        {"fit_rms_residual", report.fit_rms_residual},
                        {"max_extraneous_coeff", report.max_extraneous_coeff},
                        {"strategies_agree", report.strategies_agree},
                        {"all_reference_pass", report.all_reference_pass}};
  if (opt.with_gaps) {
    auto gaps = engine.mode_gap_report(measure);
    ordered_json grows = ordered_json::array();
    for (const auto& g : gaps.rows)
      grows.push_back({{"monomial", g.monomial},
                       {"first_order", g.first_order_coeff},
                       {"exact", g.exact_coeff},
                       {"gap", g.gap}});
    doc["mode_gaps"] = {{"rows", std::move(grows)},
                        {"max_abs_gap", gaps.max_abs_gap}};
  }

  std::string csv =
      "monomial,pointwise,fit,reference,strategy_gap_rel,reference_gap_rel,status\n";
  for (const auto& row : report.rows) {
    csv += row.monomial + "," + csv_number(row.pointwise) + "," +
           csv_number(row.fit) + ",";
    csv += row.reference ? csv_number(*row.reference) : std::string();
    csv += "," + csv_number(row.strategy_gap_rel) + ",";
    csv += row.reference_gap_rel ? csv_number(*row.reference_gap_rel) : std::string();
    csv += "," + row.status + "\n";
  }
  emit(common, doc, csv);

  bool failed_rows = false;
  for (const auto& row : report.rows)
    if (row.status == "fail") failed_rows = true;
  if (opt.strict && (!report.strategies_agree || failed_rows)) return 3;
  return 0;
}

struct PressureOpts {
  double s = 1.0;
  int depth = 0;
  int n_min = 4;
  double tol = 1e-9;
  bool use_weights = false;
};

int run_pressure(const CommonOpts& common, const PressureOpts& opt) {
  auto engine = make_engine(common);
  auto params = params_of(common);
  juliadyn::OrbitCache cache(engine.conjugacy(), params);
  juliadyn::PotentialSpec pot;
  pot.s = opt.s;
  if (opt.use_weights || !common.weights_text.empty())
    pot.weights = weights_of(common, engine.degree());
  auto limit = juliadyn::pressure_limit(cache, pot, opt.n_min, opt.depth, opt.tol);

  auto doc = document_head("pressure", common, params);
  doc["potential"] = {{"s", opt.s}};
  if (pot.weights) doc["potential"]["weights"] = pot.weights->p;
  doc["result"] = {{"value", limit.value},
                   {"error_estimate", limit.error_estimate},
                   {"converged", limit.converged},
                   {"monotone_gaps", limit.monotone_gaps},
                   {"n_min", limit.n_min},
                   {"n_max", limit.n_max},
                   {"finite_scale", limit.finite_scale},
                   {"ratio_diffs", limit.ratio_diffs},
                   {"accelerated", limit.accelerated}};

  std::string csv = "key,value\n";
  csv += "value," + csv_number(limit.value) + "\n";
  csv += "error_estimate," + csv_number(limit.error_estimate) + "\n";
  csv += "converged," + std::string(limit.converged ? "1" : "0") + "\n";
  for (std::size_t i = 0; i < limit.finite_scale.size(); ++i)
    csv += "P_" + std::to_string(limit.n_min + static_cast<int>(i)) + "," +
           csv_number(limit.finite_scale[i]) + "\n";
  emit(common, doc, csv);
  return 0;
}

struct DimensionOpts {
  int depth = 0;
  int n_min = 4;
  double tol = 1e-6;
};

int run_dimension(const CommonOpts& common, const DimensionOpts& opt) {
  auto engine = make_engine(common);
  auto params = params_of(common);
  juliadyn::OrbitCache cache(engine.conjugacy(), params);
  auto dim = juliadyn::hausdorff_dimension(cache, opt.tol, opt.n_min, opt.depth);

  auto doc = document_head("dimension", common, params);
  doc["result"] = {{"dimension", dim.dimension},
                   {"pressure_at_root", dim.pressure_at_root},
                   {"error_estimate", dim.error_estimate},
                   {"n_max", dim.n_max}};

  std::string csv = "key,value\n";
  csv += "dimension," + csv_number(dim.dimension) + "\n";
  csv += "pressure_at_root," + csv_number(dim.pressure_at_root) + "\n";
  csv += "error_estimate," + csv_number(dim.error_estimate) + "\n";
  emit(common, doc, csv);
  return 0;
}

struct OrbitOpts {
  int n = 6;
  std::string method = "newton";
};

int run_orbits(const CommonOpts& common, const OrbitOpts& opt) {
  auto engine = make_engine(common);
  auto params = params_of(common);
  auto method = opt.method == "roots" ? juliadyn::OrbitMethod::PolynomialRoots
                                      : juliadyn::OrbitMethod::NewtonFromAngles;
  auto orbits = juliadyn::periodic_points(engine.conjugacy(), params, opt.n, method);

  auto doc = document_head("orbits", common, params);
  doc["period"] = orbits.period;
  doc["count"] = orbits.points.size();
  ordered_json pts = ordered_json::array(), mults = ordered_json::array(),
               its = ordered_json::array();
  for (std::size_t i = 0; i < orbits.points.size(); ++i) {
    pts.push_back(complex_json(orbits.points[i]));
    mults.push_back(complex_json(orbits.multipliers[i]));
    its.push_back(orbits.itineraries[i]);
  }
  doc["points"] = std::move(pts);
  doc["multipliers"] = std::move(mults);
  doc["itineraries"] = std::move(its);

  std::string csv = "index,re,im,abs_multiplier,itinerary\n";
  for (std::size_t i = 0; i < orbits.points.size(); ++i) {
    std::string digits;
    for (int d : orbits.itineraries[i]) digits += std::to_string(d);
    csv += std::to_string(i) + "," + csv_number(orbits.points[i].real()) + "," +
           csv_number(orbits.points[i].imag()) + "," +
           csv_number(std::abs(orbits.multipliers[i])) + "," + digits + "\n";
  }
  emit(common, doc, csv);

  if (!common.svg_path.empty()) {
    juliadyn_cli::SvgScatter plot;
    plot.title = "coded periodic points, period " + std::to_string(opt.n);
    plot.points = orbits.points;
    plot.point_radius = 2.0;
    plot.write(common.svg_path);
  }
  return 0;
}

struct JuliaOpts {
  int n = 4000;
};

int run_julia(const CommonOpts& common, const JuliaOpts& opt) {
  auto engine = make_engine(common);
  auto params = params_of(common);
  auto poly = engine.polynomial(params);
  auto cert = juliadyn::classify_hyperbolic(poly);
  auto cloud = juliadyn::julia_cloud(poly, opt.n, common.seed);

  auto doc = document_head("julia", common, params);
  const char* verdict =
      cert.verdict == juliadyn::HyperbolicityVerdict::HyperbolicConnected
          ? "hyperbolic-connected"
          : cert.verdict == juliadyn::HyperbolicityVerdict::Escaping
                ? "escaping"
                : "undecided";
  doc["classification"] = {{"verdict", verdict},
                           {"attracting_period", cert.attracting_period.value_or(0)},
                           {"cycle_multiplier", cert.cycle_multiplier}};
  doc["count"] = cloud.points.size();
  doc["seed"] = cloud.seed;
  ordered_json pts = ordered_json::array();
  for (const auto& z : cloud.points) pts.push_back(complex_json(z));
  doc["points"] = std::move(pts);

  std::string csv = "index,re,im\n";
  for (std::size_t i = 0; i < cloud.points.size(); ++i)
    csv += std::to_string(i) + "," + csv_number(cloud.points[i].real()) + "," +
           csv_number(cloud.points[i].imag()) + "\n";
  emit(common, doc, csv);

  if (!common.svg_path.empty()) {
    juliadyn_cli::SvgScatter plot;
    plot.title = "Julia set cloud";
    plot.points = cloud.points;
    plot.write(common.svg_path);
  }
  return 0;
}

struct VerifyOpts {
  int criterion = 0;  // 0: all
  std::string cli_binary;
  bool strict = true;
};

int run_verify(const CommonOpts& common, const VerifyOpts& opt) {
  juliadyn::VerifySuiteOptions suite_opts;
  if (!opt.cli_binary.empty()) {
    suite_opts.cli_path = opt.cli_binary;
  } else {
    char buf[PATH_MAX];
    ssize_t got = ::readlink("/proc/self/exe", buf, sizeof(buf) - 1);
    if (got > 0) {
      buf[got] = '\0';
      suite_opts.cli_path = buf;
    }
  }
  juliadyn::VerifySuite suite(suite_opts);

  std::vector<juliadyn::CriterionResult> results;
  if (opt.criterion > 0) {
    results.push_back(suite.run(opt.criterion));
    std::fprintf(stderr, "criterion %d %s (%.1fs) %s\n", results.back().number,
                 results.back().pass ? "PASS" : "FAIL", results.back().seconds,
                 results.back().title.c_str());
  } else {
    for (int k = 1; k <= juliadyn::VerifySuite::criterion_count(); ++k) {
      results.push_back(suite.run(k));
      std::fprintf(stderr, "criterion %d %s (%.1fs) %s\n", results.back().number,
                   results.back().pass ? "PASS" : "FAIL", results.back().seconds,
                   results.back().title.c_str());
    }
  }

  bool all_pass = true;
  ordered_json rows = ordered_json::array();
  for (const auto& r : results) {
    all_pass = all_pass && r.pass;
    ordered_json checks = ordered_json::array();
    for (const auto& c : r.checks) {
      checks.push_back({{"id", c.id},
                        {"description", c.description},
                        {"computed", c.computed},
                        {"target", c.target},
                        {"tolerance", c.tolerance},
                        {"pass", c.pass},
                        {"tag", c.tag},
                        {"note", c.note}});
    }
    rows.push_back({{"number", r.number},
                    {"title", r.title},
                    {"pass", r.pass},
                    {"seconds", r.seconds},
                    {"checks", std::move(checks)}});
  }

  ordered_json doc;
  doc["command"] = "verify";
  doc["version"] = kVersion;
  doc["all_pass"] = all_pass;
  doc["criteria"] = std::move(rows);

  std::string csv = "id,description,computed,target,tolerance,pass,tag\n";
  for (const auto& r : results)
    for (const auto& c : r.checks)
      csv += c.id + "," + c.description + "," + csv_number(c.computed) + "," +
             csv_number(c.target) + "," + csv_number(c.tolerance) + "," +
             (c.pass ? "1" : "0") + "," + c.tag + "\n";
  emit(common, doc, csv);
  return (opt.strict && !all_pass) ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Lyapunov exponents, pressure and Hausdorff dimension of hyperbolic "
      "polynomial Julia sets under Bernoulli codings"};
  app.set_version_flag("--version", std::string("juliadyn ") + kVersion);
  app.set_config("--config", "", "Read options from an INI/TOML file");
  app.require_subcommand(0, 1);

  bool show_schema = false;
  app.add_flag("--schema-path", show_schema,
               "Print the path of the JSON output schema and exit");

  CommonOpts lyap_common, expand_common, pressure_common, dimension_common,
      orbit_common, julia_common, verify_common;
  LyapOpts lyap_opts;
  ExpandOpts expand_opts;
  PressureOpts pressure_opts;
  DimensionOpts dimension_opts;
  OrbitOpts orbit_opts;
  JuliaOpts julia_opts;
  VerifyOpts verify_opts;

  auto* lyap = app.add_subcommand("lyap", "Lyapunov exponent of a family member");
  add_common(lyap, lyap_common);
  lyap->add_option("--method", lyap_opts.method,
                   "conjugacy | expansion | mc | dirac")
      ->capture_default_str();
  lyap->add_option("--mode", lyap_opts.mode, "exact | first-order")
      ->check(CLI::IsMember({"exact", "first-order"}))
      ->capture_default_str();
  lyap->add_option("--symbol", lyap_opts.symbol,
                   "Symbol of the degenerate limit (method dirac)")
      ->capture_default_str();
  lyap->add_option("--chains", lyap_opts.chains, "Sampler chains")
      ->capture_default_str();
  lyap->add_option("--steps", lyap_opts.steps, "Sampler steps per chain")
      ->capture_default_str();
  lyap->add_option("--burn", lyap_opts.burn, "Sampler burn-in steps")
      ->capture_default_str();

  auto* expand = app.add_subcommand(
      "expand", "Expansion coefficients of the exponent in the parameter");
  add_common(expand, expand_common);
  expand->add_option("--measure", expand_opts.measure, "dirac | fixed")
      ->check(CLI::IsMember({"dirac", "fixed"}))
      ->capture_default_str();
  expand->add_option("--mode", expand_opts.mode, "first-order | exact")
      ->check(CLI::IsMember({"first-order", "exact"}))
      ->capture_default_str();
  expand->add_option("--symbol", expand_opts.symbol,
                     "Symbol of the degenerate limit (measure dirac)")
      ->capture_default_str();
  expand->add_option("--radius", expand_opts.radius,
                     "Fit radius of the parameter grid")
      ->capture_default_str();
  expand->add_flag("--strict", expand_opts.strict,
                   "Exit 3 when strategies disagree or a printed target fails");
  expand->add_flag("--mode-gaps", expand_opts.with_gaps,
                   "Include the first-order vs exact coefficient gaps");

  auto* pressure =
      app.add_subcommand("pressure", "Topological pressure of -s log|P'| (+ weights)");
  add_common(pressure, pressure_common);
  pressure->add_option("--s", pressure_opts.s, "Geometric potential multiplier")
      ->capture_default_str();
  pressure->add_option("--depth", pressure_opts.depth,
                       "Deepest periodic level (0: family default 14/9)");
  pressure->add_option("--nmin", pressure_opts.n_min, "Shallowest periodic level")
      ->capture_default_str();
  pressure->add_option("--tol", pressure_opts.tol, "Extrapolation tolerance")
      ->capture_default_str();

  auto* dimension =
      app.add_subcommand("dimension", "Hausdorff dimension via the pressure root");
  add_common(dimension, dimension_common);
  dimension->add_option("--depth", dimension_opts.depth,
                        "Deepest periodic level (0: family default 14/9)");
  dimension->add_option("--nmin", dimension_opts.n_min, "Shallowest periodic level")
      ->capture_default_str();
  dimension->add_option("--tol", dimension_opts.tol, "Bisection tolerance")
      ->capture_default_str();

  auto* orbits = app.add_subcommand("orbits", "Coded periodic points of period n");
  add_common(orbits, orbit_common, /*with_svg=*/true);
  orbits->add_option("--n", orbit_opts.n, "Period")->capture_default_str();
  orbits->add_option("--orbit-method", orbit_opts.method, "newton | roots")
      ->check(CLI::IsMember({"newton", "roots"}))
      ->capture_default_str();

  auto* julia = app.add_subcommand("julia", "Julia set point cloud by inverse iteration");
  add_common(julia, julia_common, /*with_svg=*/true);
  julia->add_option("--n", julia_opts.n, "Number of points")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Run the verification suite");
  add_common(verify, verify_common);
  verify->add_option("--criterion", verify_opts.criterion,
                     "Criterion number (0: all)")
      ->capture_default_str();
  verify->add_option("--cli-binary", verify_opts.cli_binary,
                     "Binary used for the determinism check (default: self)");
  verify->add_flag("!--no-strict", verify_opts.strict,
                   "Do not exit 3 on failing criteria");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (show_schema) {
    std::printf("%s/cli_output.schema.json\n", JULIADYN_SCHEMA_DIR);
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::fputs(app.help().c_str(), stderr);
    return 1;
  }

  try {
    if (lyap->parsed()) return run_lyap(lyap_common, lyap_opts);
    if (expand->parsed()) return run_expand(expand_common, expand_opts);
    if (pressure->parsed()) return run_pressure(pressure_common, pressure_opts);
    if (dimension->parsed()) return run_dimension(dimension_common, dimension_opts);
    if (orbits->parsed()) return run_orbits(orbit_common, orbit_opts);
    if (julia->parsed()) return run_julia(julia_common, julia_opts);
    if (verify->parsed()) return run_verify(verify_common, verify_opts);
  } catch (const juliadyn::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
