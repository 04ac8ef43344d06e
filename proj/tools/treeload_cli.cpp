#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "treeload/errors.hpp"

using namespace treeload;
using namespace treeload::cli;

namespace {

void common_flags(CLI::App* app, Common& c) {
  app->add_option("--alpha", c.alpha, "attachment parameter in [0,1], decimal or ratio such as 1/3")
      ->capture_default_str();
  app->add_option("--out", c.out, "output path (default: standard output)");
  app->add_option("--precision-bits", c.precision_bits, "working precision; above 53 forces MPFR")
      ->capture_default_str();
  app->add_option("--threads", c.threads, "OpenMP threads (0: runtime default)");
}

int fail(int code, const std::string& msg) {
  std::cerr << "treeload: " << msg << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge load, cluster size and in-degree statistics of growing random trees"};
  app.require_subcommand(1);

  ExactOptions ex;
  auto* exact = app.add_subcommand("exact", "tabulate a closed-form distribution");
  exact->add_option("kind", ex.kind,
                    "joint | marginal-n | marginal-q | ccdf-n | ccdf-q | cond-n | cond-q | cond-mean | "
                    "cond-mean-q | load | load-given-q | load-ccdf | load-mean")
      ->required();
  common_flags(exact, ex.common);
  exact->add_option("--tau", ex.tau, "network time (edges) or 'inf'")->capture_default_str();
  exact->add_option("--max-n", ex.max_n, "largest cluster index");
  exact->add_option("--max-q", ex.max_q, "largest in-degree");
  exact->add_option("--q", ex.q, "conditioning in-degree");
  exact->add_option("--n", ex.n, "conditioning cluster index");
  exact->add_option("--lambda", ex.lambda, "rescaled load grid lo:hi[:step]");

  GrowOptions gr;
  auto* growc = app.add_subcommand("grow", "grow trees and write per-edge records");
  common_flags(growc, gr.common);
  growc->add_option("--size", gr.size, "edges per tree")->required();
  growc->add_option("--reps", gr.reps, "realizations")->capture_default_str();
  growc->add_option("--seed", gr.seed, "64-bit master seed")->capture_default_str();
  growc->add_flag("--q-min", gr.q_min, "add the q_min column");
  growc->add_option("--parents", gr.parents_out, "also write the parent array (single realization)");
  growc->add_option("--stats", gr.stats_out, "also write accumulated counters as JSON");

  CompareOptions cm;
  auto* compare = app.add_subcommand("compare", "simulate and compare against the closed forms");
  compare->add_option("kind", cm.kind, "joint | ccdf-n | ccdf-q | cond-mean-n | cond-mean-q | load-ccdf | load-mean")
      ->required();
  common_flags(compare, cm.common);
  compare->add_option("--size", cm.size, "edges per tree")->required();
  compare->add_option("--reps", cm.reps, "realizations")->capture_default_str();
  compare->add_option("--seed", cm.seed, "64-bit master seed")->capture_default_str();
  compare->add_option("--q", cm.q, "in-degree for load-ccdf")->capture_default_str();
  compare->add_option("--z-max", cm.z_max, "largest accepted |z|")->capture_default_str();
  compare->add_option("--min-expected", cm.min_expected, "points below this expected count are not judged")
      ->capture_default_str();
  compare->add_option("--ccdf-floor", cm.ccdf_floor, "CCDF points below this are not judged")
      ->capture_default_str();
  compare->add_option("--max-condition", cm.max_condition, "largest condition for conditional means");

  VerifyOptions vf;
  auto* verify = app.add_subcommand("verify", "run the oracle suite and write a JSON report");
  common_flags(verify, vf.common);
  verify->add_option("--tau-max", vf.tau_max, "largest tau for DP and normalization checks")->capture_default_str();
  verify->add_option("--enumerate-max", vf.enumerate_max, "largest tau for history enumeration")
      ->capture_default_str();
  verify->add_option("--tol", vf.tol, "tolerance for the DP joint check")->capture_default_str();
  verify->add_option("--seed", vf.seed, "seed of the tree used by the betweenness check")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kConfigError, e.what());
  }

  try {
    if (*exact) return cmd_exact(ex);
    if (*growc) return cmd_grow(gr);
    if (*compare) return cmd_compare(cm);
    if (*verify) return cmd_verify(vf);
  } catch (const IoError& e) {
    return fail(kIoError, e.what());
  } catch (const NumericIntegrityError& e) {
    return fail(kNumericError, e.what());
  } catch (const ConfigError& e) {
    return fail(kConfigError, e.what());
  } catch (const std::logic_error& e) {
    // domain, bound, conditioning and parameter errors all derive from here
    return fail(kConfigError, e.what());
  } catch (const EmptyConditionError& e) {
    return fail(kConfigError, e.what());
  } catch (const std::exception& e) {
    return fail(kNumericError, e.what());
  }
  return kConfigError;
}
