// Command-line surface for the library: builders, verifiers and emitters
// wired up for reproducible runs.
//
// Exit codes: 0 when everything asserted holds, 1 when a verification fails,
// 2 on usage or input errors. DOOBMAX_OUTPUT_DIR prefixes relative output
// paths so batch runs can be redirected without touching the flags.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "doobmax/bounds.hpp"
#include "doobmax/constants.hpp"
#include "doobmax/format.hpp"
#include "doobmax/numeric.hpp"
#include "doobmax/suites.hpp"

namespace {

using namespace doobmax;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DocumentError("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

SimpleFunction parse_values(const std::string& text, const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DocumentError(path + ": " + e.what());
  }
  if (!doc.is_array()) throw DocumentError(path + ": expected a JSON array of leaf values");
  SimpleFunction f;
  f.reserve(doc.size());
  for (const auto& x : doc) {
    if (!x.is_number()) throw DocumentError(path + ": expected a JSON array of leaf values");
    f.push_back(x.get<double>());
  }
  return f;
}

std::string resolve_output(const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  const char* dir = std::getenv("DOOBMAX_OUTPUT_DIR");
  if (dir == nullptr || *dir == '\0') return path;
  std::string prefix(dir);
  if (prefix.back() != '/') prefix += '/';
  return prefix + path;
}

// Empty path prints to stdout; otherwise writes the file and notes it on
// stderr, keeping stdout clean for piped output.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::string resolved = resolve_output(path);
  std::ofstream out(resolved);
  if (!out) throw DocumentError("cannot write " + resolved);
  out << text;
  if (!out) throw DocumentError("cannot write " + resolved);
  std::cerr << "wrote " << resolved << "\n";
}

// Shared space source: builtin dyadic depth or a JSON document.
struct SpaceOpts {
  int dyadic = 3;
  std::string path;

  void attach(CLI::App* cmd) {
    CLI::Option* d = cmd->add_option("--dyadic", dyadic, "builtin dyadic space of this depth")
                         ->check(CLI::Range(0, kMaxDyadicDepth))
                         ->capture_default_str();
    cmd->add_option("--space", path, "space document (JSON)")->excludes(d);
  }
  FilteredSpace load() const {
    if (!path.empty()) return parse_space_document(read_file(path));
    return FilteredSpace::dyadic(dyadic);
  }
};

SimpleFunction load_function(const std::string& path, const FilteredSpace& space,
                             std::uint64_t seed, bool signed_values) {
  if (!path.empty()) return parse_values(read_file(path), path);
  SplitMix64 rng(seed);
  return random_function(rng, space.leaf_count(), signed_values, 0.2);
}

Weight load_weight(const std::string& path, const FilteredSpace& space) {
  if (!path.empty()) return Weight(parse_values(read_file(path), path));
  return Weight(SimpleFunction(space.leaf_count(), 1.0));
}

int run_ap(const SpaceOpts& source, const std::string& weight_path, double p,
           const std::string& output) {
  FilteredSpace space = source.load();
  Weight v = load_weight(weight_path, space);
  emit(output, ap_report_document(ap_characteristic(space, v, p)) + "\n");
  return 0;
}

int run_maximal(const SpaceOpts& source, const std::string& function_path,
                const std::string& weight_path, std::uint64_t seed, int from_level,
                const std::string& output) {
  FilteredSpace space = source.load();
  SimpleFunction f = load_function(function_path, space, seed, true);
  require_same_shape(space, f);
  SimpleFunction mf = weight_path.empty()
                          ? tailed_maximal(space, f, from_level)
                          : weighted_maximal(space, f, load_weight(weight_path, space).values());
  std::string csv = "leaf,f,value\n";
  for (std::size_t leaf = 0; leaf < f.size(); ++leaf)
    csv += std::to_string(leaf) + "," + format_double(f[leaf]) + "," + format_double(mf[leaf]) +
           "\n";
  emit(output, csv);
  return 0;
}

int run_principal(const SpaceOpts& source, const std::string& function_path, std::uint64_t seed,
                  double a, int base_level, int base_scale, bool auto_scale,
                  const std::string& output) {
  FilteredSpace space = source.load();
  SimpleFunction h = load_function(function_path, space, seed, false);
  require_same_shape(space, h);
  space.require_level(base_level);

  if (auto_scale) {
    // Aim at the largest node average so the root slice is nonempty.
    double top = 0.0;
    for (double avg : node_averages(space, h, base_level)) top = std::max(top, avg);
    base_scale = top > 0.0 ? scale_index(top, a) : 0;
  }

  PrincipalForest forest =
      build_principal_forest(space, h, a, base_level, base_scale, space.all_leaves());
  PropertyReport props = verify_properties(space, forest);
  DominationReport dom = tail_domination_check(space, forest);

  std::cerr << "forest: level " << base_level << ", scale " << base_scale << ", "
            << props.sets_checked << " sets" << (forest.empty ? " (empty slice)" : "") << "\n";
  int status = 0;
  for (std::size_t i = 0; i < props.property.size(); ++i) {
    const CheckResult& check = props.property[i];
    std::cerr << "property " << i + 1 << ": " << (check.pass ? "pass" : "FAIL") << "\n";
    if (!check.pass) {
      std::cerr << "  " << check.detail << "\n";
      status = 1;
    }
  }
  std::cerr << "mass bound: " << (props.mass_bound.pass ? "pass" : "FAIL") << "\n";
  if (!props.mass_bound.pass) {
    std::cerr << "  " << props.mass_bound.detail << "\n";
    status = 1;
  }
  std::cerr << "domination: " << (dom.pass() ? "pass" : "FAIL") << " (margin "
            << format_double(dom.min_margin) << ")\n";
  if (!dom.pass()) status = 1;

  emit(output, forest_document(forest) + "\n");
  return status;
}

int run_stopping(const SpaceOpts& source, const std::string& function_path,
                 const std::string& weight_path, std::uint64_t seed, double p, double b,
                 const std::string& output) {
  FilteredSpace space = source.load();
  SimpleFunction f = load_function(function_path, space, seed, true);
  require_same_shape(space, f);
  Weight v = load_weight(weight_path, space);

  StoppingDecomposition dec = build_decomposition(space, f, v, p, b);
  PartitionReport partition = verify_partition(space, dec, f);
  ChainReport chain = verify_chain(space, dec, f, v, p);

  std::cerr << "cells: " << dec.cells.size() << "\n";
  std::cerr << "partition: " << (partition.pass ? "pass" : "FAIL") << "\n";
  if (!partition.pass) std::cerr << "  " << partition.detail << "\n";
  std::cerr << "lhs " << format_double(chain.lhs) << " <= cell bound "
            << format_double(chain.cell_bound) << " <= weak bound "
            << format_double(chain.weak_bound) << "; final bound "
            << format_double(chain.final_bound) << "\n";
  std::cerr << "limit constant: " << format_double(chain.limit_constant) << "\n";
  std::cerr << "chain: " << (chain.pass() ? "pass" : "FAIL") << "\n";

  emit(output, decomposition_csv(space, dec, v));
  return partition.pass && chain.pass() ? 0 : 1;
}

int run_verify(const std::vector<std::string>& names, std::uint64_t seed, std::size_t trials,
               int max_depth, const std::vector<double>& p_values,
               const std::vector<double>& b_values, const std::string& csv_path) {
  std::vector<std::string> order = names;
  if (order.size() == 1 && order.front() == "all")
    order = {"unweighted", "bracket", "family", "principal", "sparse", "stopping"};
  if (!csv_path.empty() && order.size() != 1)
    throw ParameterError("--csv needs exactly one suite");

  int status = 0;
  for (const std::string& name : order) {
    SuiteResult result;
    if (name == "unweighted")
      result = unweighted_doob_suite(seed, trials, p_values, max_depth);
    else if (name == "bracket")
      result = bracket_suite(seed, trials, p_values, max_depth);
    else if (name == "family")
      result = family_identity_suite(seed, trials, max_depth);
    else if (name == "principal")
      result = principal_suite(seed, trials, max_depth);
    else if (name == "sparse")
      result = sparse_bound_suite(seed, trials, max_depth);
    else if (name == "stopping")
      result = stopping_suite(seed, trials, b_values, max_depth);
    else
      throw ParameterError("unknown suite: " + name);

    std::cout << "suite " << result.name << ": trials=" << result.trials
              << " checks=" << result.checks << " failures=" << result.failures
              << " worst_margin=" << format_double(result.worst_margin) << "\n";
    if (!result.pass()) {
      std::cout << "first failure: " << result.first_failure << "\n";
      status = 1;
    }
    if (!csv_path.empty()) emit(csv_path, result.csv);
  }
  return status;
}

int run_sharpness(double p, const std::vector<double>& alphas, int depth, std::size_t budget,
                  const std::string& output) {
  SharpnessTable table = sharpness_experiment(p, alphas, depth, budget);
  int status = 0;
  for (const SharpnessRow& row : table.rows)
    if (!leq_rel(row.best_ratio, row.upper_bound, 1e-9)) {
      std::cerr << "FAIL: ratio above the proven bound at alpha = " << format_double(row.alpha)
                << "\n";
      status = 1;
    }
  std::cerr << "band factor: " << format_double(table.band_factor)
            << ", characteristic span: " << format_double(table.char_span) << "\n";
  emit(output, sharpness_csv(table));
  return status;
}

int run_constants(const std::vector<double>& p_values) {
  std::cout << "p,p_conjugate,psi,phi,a0,bound_sharp,unweighted\n";
  int status = 0;
  for (double p : p_values) {
    ConstantProfile prof = profile(p);
    std::cout << format_double(prof.p) << "," << format_double(prof.p_conjugate) << ","
              << format_double(prof.psi) << "," << format_double(prof.phi) << ","
              << format_double(prof.a0) << "," << format_double(prof.bound_sharp) << ","
              << format_double(prof.unweighted) << "\n";
    MinimizerReport minimizer = verify_minimizer(p, geometric_grid(1.01, 64.0, 400));
    if (!minimizer.pass) {
      std::cout << "minimizer FAIL: " << minimizer.detail << "\n";
      status = 1;
    }
  }
  MonotonicityReport mono = verify_monotonicity_and_limits();
  std::cout << "monotonicity and limits: " << (mono.pass() ? "pass" : "FAIL") << "\n";
  if (!mono.pass()) status = 1;
  return status;
}

int run_figure1(double p_min, double p_max, int samples, const std::string& csv_path,
                const std::string& svg_path) {
  std::vector<Figure1Row> rows = figure1_data(p_min, p_max, samples);
  int status = 0;
  for (const Figure1Row& row : rows)
    if (!(row.phi >= row.psi)) {
      std::cerr << "FAIL: phi < psi at p = " << format_double(row.p) << "\n";
      status = 1;
    }
  emit(csv_path, figure1_csv(rows));
  emit(svg_path, figure1_svg(rows));
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite filtered spaces, weighted bounds for the Doob maximal operator"};
  app.require_subcommand(1);

  SpaceOpts ap_space, maximal_space, principal_space, stopping_space;
  std::string function_path, weight_path, output;
  std::uint64_t seed = 1;
  double p = 2.0;

  CLI::App* ap_cmd = app.add_subcommand("ap", "characteristic report for a weight");
  ap_space.attach(ap_cmd);
  ap_cmd->add_option("--weight", weight_path, "weight values (JSON array)");
  ap_cmd->add_option("--p", p, "exponent")->capture_default_str();
  ap_cmd->add_option("-o,--output", output, "output path (default stdout)");

  CLI::App* maximal_cmd = app.add_subcommand("maximal", "maximal function as CSV");
  maximal_space.attach(maximal_cmd);
  maximal_cmd->add_option("--function", function_path, "leaf values (JSON array)");
  int from_level = 0;
  CLI::Option* from_opt =
      maximal_cmd->add_option("--from-level", from_level, "restrict to levels >= this")
          ->capture_default_str();
  maximal_cmd->add_option("--weight", weight_path, "average against this weight instead")
      ->excludes(from_opt);
  maximal_cmd->add_option("--seed", seed, "seed for the fallback random function")
      ->capture_default_str();
  maximal_cmd->add_option("-o,--output", output, "output path (default stdout)");

  CLI::App* principal_cmd = app.add_subcommand("principal", "build and check a stopping forest");
  principal_space.attach(principal_cmd);
  principal_cmd->add_option("--function", function_path, "leaf values (JSON array, nonnegative)");
  double a = 2.0;
  int base_level = 0;
  int base_scale = 0;
  principal_cmd->add_option("--a", a, "scale ratio")->capture_default_str();
  principal_cmd->add_option("--level", base_level, "base level")->capture_default_str();
  CLI::Option* scale_opt =
      principal_cmd->add_option("--scale", base_scale, "base scale (default: largest realized)");
  principal_cmd->add_option("--seed", seed, "seed for the fallback random function")
      ->capture_default_str();
  principal_cmd->add_option("-o,--output", output, "output path (default stdout)");

  CLI::App* stopping_cmd = app.add_subcommand("stopping", "two-parameter decomposition as CSV");
  stopping_space.attach(stopping_cmd);
  stopping_cmd->add_option("--function", function_path, "leaf values (JSON array)");
  stopping_cmd->add_option("--weight", weight_path, "weight values (JSON array)");
  double b = 2.0;
  stopping_cmd->add_option("--p", p, "exponent")->capture_default_str();
  stopping_cmd->add_option("--b", b, "height ratio")->capture_default_str();
  stopping_cmd->add_option("--seed", seed, "seed for the fallback random function")
      ->capture_default_str();
  stopping_cmd->add_option("-o,--output", output, "output path (default stdout)");

  CLI::App* verify_cmd = app.add_subcommand("verify", "randomized suites");
  std::vector<std::string> suites = {"bracket"};
  std::size_t trials = 1000;
  int max_depth = 8;
  std::vector<double> p_values = {1.5, 2.0, 3.0, 8.0};
  std::vector<double> b_values = {1.05, 1.2, 2.0};
  std::string csv_path;
  verify_cmd
      ->add_option("--suite", suites,
                   "unweighted, bracket, family, principal, sparse, stopping or all")
      ->capture_default_str();
  verify_cmd->add_option("--trials", trials, "instances per suite")->capture_default_str();
  verify_cmd->add_option("--dyadic", max_depth, "depth cap for random spaces")
      ->check(CLI::Range(1, kMaxDyadicDepth))
      ->capture_default_str();
  verify_cmd->add_option("--p", p_values, "exponents to cycle through")->capture_default_str();
  verify_cmd->add_option("--b", b_values, "height ratios to cycle through")
      ->capture_default_str();
  verify_cmd->add_option("--seed", seed, "suite seed")->capture_default_str();
  verify_cmd->add_option("--csv", csv_path, "write the suite CSV here (single suite only)");

  CLI::App* sharpness_cmd = app.add_subcommand("sharpness", "power-weight exponent experiment");
  std::vector<double> alphas = {-0.3, -0.5, -0.7, -0.9};
  int sharp_depth = 10;
  std::size_t budget = 2000;
  sharpness_cmd->add_option("--p", p, "exponent")->capture_default_str();
  sharpness_cmd->add_option("--alpha", alphas, "power-weight exponents in (-1, 0]")
      ->capture_default_str();
  sharpness_cmd->add_option("--dyadic", sharp_depth, "dyadic depth")
      ->check(CLI::Range(1, kMaxDyadicDepth))
      ->capture_default_str();
  sharpness_cmd->add_option("--budget", budget, "accepted ascent steps per search")
      ->capture_default_str();
  sharpness_cmd->add_option("-o,--output", output, "output path (default stdout)");

  CLI::App* constants_cmd = app.add_subcommand("constants", "constant profiles per exponent");
  std::vector<double> constant_ps = {2.0};
  constants_cmd->add_option("--p", constant_ps, "exponents")->capture_default_str();

  CLI::App* figure1_cmd = app.add_subcommand("figure1", "constant comparison plot data");
  double p_min = 1.1, p_max = 10.0;
  int samples = 200;
  std::string fig_csv = "figure1.csv";
  std::string fig_svg = "figure1.svg";
  figure1_cmd->add_option("--pmin", p_min, "smallest exponent")->capture_default_str();
  figure1_cmd->add_option("--pmax", p_max, "largest exponent")->capture_default_str();
  figure1_cmd->add_option("--samples", samples, "grid points")->capture_default_str();
  figure1_cmd->add_option("--csv", fig_csv, "CSV output path")->capture_default_str();
  figure1_cmd->add_option("--svg", fig_svg, "SVG output path")->capture_default_str();

  try {
    app.parse(argc, argv);
    if (ap_cmd->parsed()) return run_ap(ap_space, weight_path, p, output);
    if (maximal_cmd->parsed())
      return run_maximal(maximal_space, function_path, weight_path, seed, from_level, output);
    if (principal_cmd->parsed())
      return run_principal(principal_space, function_path, seed, a, base_level, base_scale,
                           !*scale_opt, output);
    if (stopping_cmd->parsed())
      return run_stopping(stopping_space, function_path, weight_path, seed, p, b, output);
    if (verify_cmd->parsed())
      return run_verify(suites, seed, trials, max_depth, p_values, b_values, csv_path);
    if (sharpness_cmd->parsed())
      return run_sharpness(p, alphas, sharp_depth, budget, output);
    if (constants_cmd->parsed()) return run_constants(constant_ps);
    if (figure1_cmd->parsed()) return run_figure1(p_min, p_max, samples, fig_csv, fig_svg);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const doobmax::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
