// Command-line front end over the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "affsym/affsym.h"

namespace {

constexpr int kExitInput = 2;

int fail(affsym_status st) {
  std::cerr << "affsym: error [" << affsym_status_name(st) << "]: " << affsym_last_error() << "\n";
  return kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Affine hypersurface symmetry checks: geometry residuals, lemma oracles, canonical pairs"};
  app.set_version_flag("--version", std::string(affsym_version()));
  app.require_subcommand(1);

  affsym_options opts;
  affsym_options_default(&opts);
  std::string filter = "*", output, scenario_path, matrix_path;
  bool strict = false;

  app.add_option("--seed", opts.seed, "master seed")->capture_default_str();
  app.add_option("--tol", opts.tol, "check tolerance")->capture_default_str();
  app.add_option("--p-max", opts.p_max, "largest power p")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--trials", opts.trials, "oracle draws per family")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--filter", filter, "oracle id glob")->capture_default_str();
  app.add_option("--output", output, "report path (default stdout)");
  app.add_flag("--strict", strict, "WARN records fail the run");

  auto* geo = app.add_subcommand("check-geometry", "residuals, curvature operator checks and the rank theorem");
  geo->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  auto* orc = app.add_subcommand("oracles", "closed forms vs brute-force curvature powers");
  auto* dec = app.add_subcommand("decompose", "canonical form of an H-selfadjoint matrix");
  dec->add_option("--matrix,matrix", matrix_path, "matrix JSON file {dim, A, H}")->required();
  auto* lst = app.add_subcommand("list-oracles", "print the oracle catalog");
  for (auto* sub : {geo, orc, dec, lst}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }
  opts.filter = filter.c_str();
  opts.strict = strict ? 1 : 0;

  affsym_report* rep = nullptr;
  affsym_status st = AFFSYM_OK;
  if (*geo) {
    affsym_scenario* sc = nullptr;
    st = affsym_scenario_load_file(scenario_path.c_str(), &sc);
    if (st != AFFSYM_OK) return fail(st);
    st = affsym_check_geometry(sc, &opts, &rep);
    affsym_scenario_free(sc);
  } else if (*orc) {
    st = affsym_run_oracles(&opts, &rep);
  } else if (*dec) {
    st = affsym_decompose_file(matrix_path.c_str(), &opts, &rep);
  } else {
    st = affsym_list_oracles(&rep);
  }
  if (st != AFFSYM_OK) return fail(st);

  const char* text = affsym_report_json(rep);
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output, std::ios::binary);
    if (!(out << text)) {
      std::cerr << "affsym: error [io]: cannot write '" << output << "'\n";
      affsym_report_free(rep);
      return kExitInput;
    }
  }
  std::cerr << "PASS " << affsym_report_count(rep, "PASS") << "  FAIL " << affsym_report_count(rep, "FAIL")
            << "  VACUOUS " << affsym_report_count(rep, "VACUOUS") << "  WARN " << affsym_report_count(rep, "WARN")
            << "\n";
  const int code = affsym_report_exit_code(rep, opts.strict);
  affsym_report_free(rep);
  return code;
}
