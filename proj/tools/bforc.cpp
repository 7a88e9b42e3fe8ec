// Command-line runner for the coupled flow/heat convergence studies.

#include "bforc/runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::vector<int> parse_levels(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size() || v < 1) throw std::invalid_argument("bad level '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("no levels given");
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (out[k] <= out[k - 1]) throw std::invalid_argument("levels must be strictly increasing");
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convergence studies for the coupled nonlinear flow/heat finite element solver"};

  std::string test = "1";
  std::string element = "taylor-hood";
  std::string levels_text;
  std::string emit_text = "csv";
  double s_override = 0.0;
  long seed = 0;
  bforc::RunConfig cfg;

  app.add_option("--test", test, "Verification case: 1..4 or 'custom'")->capture_default_str();
  app.add_option("--element", element, "Velocity/pressure pair: taylor-hood or mini")
      ->check(CLI::IsMember({"taylor-hood", "mini"}))
      ->capture_default_str();
  app.add_option("--levels", levels_text, "Comma-separated mesh levels, e.g. 4,8,16,32");
  app.add_option("--tol", cfg.tol, "Fixed-point stopping tolerance")->capture_default_str();
  app.add_option("--max-iter", cfg.max_iter, "Fixed-point iteration budget")->capture_default_str();
  app.add_option("--out", cfg.output_dir, "Output directory")->capture_default_str();
  app.add_option("--emit", emit_text, "Comma-separated outputs from {csv,svg,vtk}")->capture_default_str();
  app.add_option("--s", s_override, "Drag exponent in [3,4] (custom mode only)");
  app.add_option("--seed", seed, "Reserved; all runs are deterministic");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (test == "custom") {
      cfg.test_id = 0;
      if (s_override == 0.0) throw std::invalid_argument("--test custom requires --s");
    } else {
      std::size_t pos = 0;
      int id = 0;
      try {
        id = std::stoi(test, &pos);
      } catch (const std::exception&) {
        throw std::invalid_argument("--test must be 1..4 or 'custom'");
      }
      if (pos != test.size() || id < 1 || id > 4) {
        throw std::invalid_argument("--test must be 1..4 or 'custom'");
      }
      cfg.test_id = id;
      if (s_override != 0.0) throw std::invalid_argument("--s is only valid with --test custom");
    }
    if (s_override != 0.0 && !(s_override >= 3.0 && s_override <= 4.0)) {
      throw std::invalid_argument("--s must lie in [3,4]");
    }
    cfg.s_override = s_override;
    cfg.element.pair =
        element == "mini" ? bforc::ElementPair::Mini : bforc::ElementPair::TaylorHood;
    if (levels_text.empty()) {
      cfg.levels = cfg.element.pair == bforc::ElementPair::Mini ? std::vector<int>{8, 16, 32, 64}
                                                                : std::vector<int>{4, 8, 16, 32};
    } else {
      cfg.levels = parse_levels(levels_text);
    }
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("--tol must be positive");
    if (cfg.max_iter < 1) throw std::invalid_argument("--max-iter must be >= 1");

    cfg.emit_csv = cfg.emit_svg = cfg.emit_vtk = false;
    std::stringstream ss(emit_text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok == "csv") cfg.emit_csv = true;
      else if (tok == "svg") cfg.emit_svg = true;
      else if (tok == "vtk") cfg.emit_vtk = true;
      else if (!tok.empty()) throw std::invalid_argument("unknown --emit entry '" + tok + "'");
    }
    if (cfg.emit_svg && cfg.levels.size() < 2) {
      throw std::invalid_argument("--emit svg needs at least two levels");
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  return bforc::run_convergence(cfg, std::cout);
}
