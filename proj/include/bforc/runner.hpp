#pragma once

#include "bforc/convergence.hpp"
#include "bforc/report.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <ostream>
#include <semaphore>
#include <string>
#include <thread>
#include <vector>

namespace bforc {

/// Experiment configuration assembled from command-line flags.
struct RunConfig {
  int test_id = 1;          // 1..4; 0 selects the custom-exponent mode
  double s_override = 0.0;  // required when test_id == 0
  ElementChoice element;
  std::vector<int> levels{4, 8, 16, 32};
  double tol = 1e-6;
  int max_iter = 100;
  std::string output_dir = ".";
  bool emit_csv = true;
  bool emit_svg = false;
  bool emit_vtk = false;

  std::string element_name() const {
    return element.pair == ElementPair::TaylorHood ? "taylor-hood" : "mini";
  }
  std::string test_name() const { return test_id == 0 ? "custom" : std::to_string(test_id); }
};

namespace detail {

/// Worker cap from BFORC_THREADS; unset or 0 means auto.
inline unsigned worker_count(std::size_t n_tasks) {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BFORC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) cap = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(std::min<std::size_t>(cap, n_tasks));
}

}  // namespace detail

/// Run the configured refinement study, write the requested artifacts, and
/// map failures to exit codes: 0 success, 2 fixed-point non-convergence,
/// 3 linear solver failure.
inline int run_convergence(const RunConfig& cfg, std::ostream& log) {
  try {
    const TestCase tc = make_test_case(cfg.test_id, cfg.s_override);
    const std::size_t n_levels = cfg.levels.size();

    std::vector<ConvergenceRow> rows(n_levels);
    std::vector<StateVector> states(cfg.emit_vtk ? n_levels : 0);

    const unsigned workers = detail::worker_count(n_levels);
    std::counting_semaphore<256> slots(workers);
    std::vector<std::future<void>> tasks;
    tasks.reserve(n_levels);
    for (std::size_t k = 0; k < n_levels; ++k) {
      tasks.push_back(std::async(std::launch::async, [&, k] {
        slots.acquire();
        struct Release {
          std::counting_semaphore<256>& s;
          ~Release() { s.release(); }
        } release{slots};
        rows[k] = solve_level(tc, cfg.element, cfg.levels[k], cfg.tol, cfg.max_iter,
                              cfg.emit_vtk ? &states[k] : nullptr);
      }));
    }
    for (auto& t : tasks) t.get();
    attach_rates(rows);

    std::filesystem::create_directories(cfg.output_dir);
    const std::string base =
        cfg.output_dir + "/convergence_test" + cfg.test_name() + "_" + cfg.element_name();

    if (cfg.emit_csv) {
      write_convergence_csv_file(base + ".csv", rows);
      log << "wrote " << base << ".csv\n";
    }
    if (cfg.emit_svg) {
      const double guide = cfg.element.pair == ElementPair::TaylorHood ? -1.0 : -0.5;
      write_convergence_svg_file(base + ".svg", rows, guide);
      log << "wrote " << base << ".svg\n";
    }
    if (cfg.emit_vtk) {
      for (std::size_t k = 0; k < n_levels; ++k) {
        const Mesh mesh = structured_unit_square(cfg.levels[k]);
        const std::string path = cfg.output_dir + "/fields_test" + cfg.test_name() + "_" +
                                 cfg.element_name() + "_n" + std::to_string(cfg.levels[k]) + ".vtk";
        write_vtk_file(path, mesh, states[k]);
        log << "wrote " << path << "\n";
      }
    }

    for (const auto& r : rows) {
      log << "n=" << r.n << " ndof=" << r.ndof << " iters=" << r.report.iterations
          << " err_u=" << r.errors.velocity_h1 << " err_p=" << r.errors.pressure_l2
          << " err_T=" << r.errors.temperature_h1;
      if (r.has_rates) {
        log << " rates=" << r.rates[0] << "," << r.rates[1] << "," << r.rates[2];
      }
      log << "\n";
    }
    return 0;
  } catch (const NonConvergenceError& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  } catch (const SingularMatrixError& e) {
    log << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace bforc
