// Acceptance gate: runs the nine release criteria and prints one line per
// criterion. Exit status 0 only when every selected criterion passes.
//
// Usage: acceptance [--criterion N]   (N = 1..9; default runs all)

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "doobmax/bounds.hpp"
#include "doobmax/constants.hpp"
#include "doobmax/numeric.hpp"
#include "doobmax/stopping.hpp"
#include "doobmax/suites.hpp"

using namespace doobmax;

namespace {

constexpr std::uint64_t kSeed = 7;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double x) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.4g", x);
  return buffer;
}

std::string suite_detail(const SuiteResult& result) {
  std::string out = std::to_string(result.trials) + " trials, " +
                    std::to_string(result.checks) + " checks, " +
                    std::to_string(result.failures) + " failures, worst margin " +
                    num(result.worst_margin);
  if (!result.pass()) out += "; first failure " + result.first_failure;
  return out;
}

Outcome run_suite_criterion(SuiteResult result) {
  return {result.pass(), suite_detail(result)};
}

Outcome criterion1() {
  std::vector<double> ps = {1.5, 2.0, 3.0, 8.0};
  return run_suite_criterion(unweighted_doob_suite(kSeed, 1000, ps, 10));
}

Outcome criterion2() {
  std::vector<double> ps = {1.5, 2.0, 3.0, 8.0};
  return run_suite_criterion(bracket_suite(kSeed, 1000, ps, 8));
}

Outcome criterion3() {
  return run_suite_criterion(family_identity_suite(kSeed, 1000, 8));
}

Outcome criterion4() {
  return run_suite_criterion(principal_suite(kSeed, 500, 8));
}

Outcome criterion5() {
  return run_suite_criterion(sparse_bound_suite(kSeed, 200, 8));
}

Outcome criterion6() {
  std::vector<double> bs = {1.05, 1.2, 2.0};
  return run_suite_criterion(stopping_suite(kSeed, 500, bs, 8));
}

Outcome criterion7() {
  ConstantProfile two = profile(2.0);
  double phi_err = std::fabs(two.phi - 6.75);
  double psi_err = std::fabs(two.psi - 2.0);
  bool closed_form = phi_err <= 1e-12 && psi_err <= 1e-12 && two.a0 == 1.5;

  bool shape = true;
  double prev_phi = HUGE_VAL, prev_psi = HUGE_VAL;
  for (double p : geometric_grid(1.1, 1e6, 200)) {
    ConstantProfile prof = profile(p);
    shape = shape && prof.phi < prev_phi && prof.psi < prev_psi && prof.phi >= prof.psi;
    if (p >= 100.0) {
      double ratio = std::log(prof.phi) / std::log(prof.psi);
      double cap = 1.0 + (1.0 + std::log(2.0)) / std::log(p);
      shape = shape && ratio > 1.0 && ratio <= cap;
    }
    prev_phi = prof.phi;
    prev_psi = prof.psi;
  }

  MonotonicityReport limits = verify_monotonicity_and_limits();

  Outcome outcome;
  outcome.pass = closed_form && shape && limits.pass();
  outcome.detail = "phi(2) err " + num(phi_err) + ", psi(2) err " + num(psi_err) +
                   ", a0(2) " + (two.a0 == 1.5 ? std::string("exact") : num(two.a0)) +
                   ", grid shape " + (shape ? "ok" : "violated") + ", limits " +
                   (limits.pass() ? "ok" : "violated");
  return outcome;
}

Outcome criterion8() {
  std::vector<double> alphas = {-0.3, -0.5, -0.7, -0.9};
  SharpnessTable table = sharpness_experiment(2.0, alphas, 14, 2000);
  bool span_ok = table.char_span >= 10.0;
  bool band_ok = table.within_band(4.0);

  Outcome outcome;
  outcome.pass = span_ok && band_ok;
  outcome.detail = "characteristic span " + num(table.char_span) +
                   (span_ok ? " >= 10" : " < 10") + ", normalized band " +
                   num(table.band_factor) + (band_ok ? " within 4" : " outside 4");
  return outcome;
}

Outcome criterion9() {
  std::vector<double> ps = {1.5, 2.0};
  std::vector<double> bs = {1.2, 2.0};
  bool ok = true;
  ok = ok && unweighted_doob_suite(kSeed, 30, ps, 6).csv ==
                 unweighted_doob_suite(kSeed, 30, ps, 6).csv;
  ok = ok && bracket_suite(kSeed, 30, ps, 6).csv == bracket_suite(kSeed, 30, ps, 6).csv;
  ok = ok && family_identity_suite(kSeed, 30, 6).csv ==
                 family_identity_suite(kSeed, 30, 6).csv;
  ok = ok && principal_suite(kSeed, 30, 6).csv == principal_suite(kSeed, 30, 6).csv;
  ok = ok && sparse_bound_suite(kSeed, 20, 6).csv == sparse_bound_suite(kSeed, 20, 6).csv;
  ok = ok && stopping_suite(kSeed, 20, bs, 6).csv == stopping_suite(kSeed, 20, bs, 6).csv;
  ok = ok && figure1_csv(figure1_data(1.1, 10.0, 60)) ==
                 figure1_csv(figure1_data(1.1, 10.0, 60));

  SplitMix64 rng(kSeed);
  FilteredSpace space = random_dyadic_space(rng, 6);
  SimpleFunction f = random_function(rng, space.leaf_count(), true, 0.2);
  Weight v = random_weight(rng, space.leaf_count(), 2.0);
  std::string once =
      decomposition_csv(space, build_decomposition(space, f, v, 2.0, 1.2), v);
  std::string twice =
      decomposition_csv(space, build_decomposition(space, f, v, 2.0, 1.2), v);
  ok = ok && once == twice;

  return {ok, ok ? "six suites, figure and decomposition CSVs byte-identical"
                 : "a repeated emission differed"};
}

struct Criterion {
  int number;
  const char* label;
  Outcome (*run)();
  double budget_s;  // 0 = no runtime requirement
};

const Criterion kCriteria[] = {
    {1, "unweighted maximal bound", criterion1, 10.0},
    {2, "two-sided weighted bracket", criterion2, 30.0},
    {3, "test-family identity", criterion3, 0.0},
    {4, "principal forests", criterion4, 30.0},
    {5, "sliced weighted estimate", criterion5, 0.0},
    {6, "stopping decomposition chain", criterion6, 0.0},
    {7, "closed-form constants", criterion7, 1.0},
    {8, "sharpness trend", criterion8, 60.0},
    {9, "seeded determinism", criterion9, 0.0},
};

}  // namespace

int main(int argc, char** argv) {
  int selected = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      selected = std::atoi(argv[++i]);
      if (selected < 1 || selected > 9) {
        std::fprintf(stderr, "error: --criterion takes a number from 1 to 9\n");
        return 2;
      }
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion N]\n");
      return 2;
    }
  }

  bool all_pass = true;
  for (const Criterion& criterion : kCriteria) {
    if (selected != 0 && criterion.number != selected) continue;

    auto start = std::chrono::steady_clock::now();
    Outcome outcome = criterion.run();
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::string detail = outcome.detail;
    if (criterion.budget_s > 0.0) {
      if (elapsed >= criterion.budget_s) {
        outcome.pass = false;
        detail += ", over the " + num(criterion.budget_s) + " s budget";
      }
    }
    std::printf("criterion %d: %s (%s; %s; %.0f ms)\n", criterion.number,
                outcome.pass ? "pass" : "FAIL", criterion.label, detail.c_str(),
                elapsed * 1000.0);
    std::fflush(stdout);
    all_pass = all_pass && outcome.pass;
  }
  return all_pass ? 0 : 1;
}
