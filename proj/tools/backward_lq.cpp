#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "blq/kernels.hpp"
#include "blq/pipeline.hpp"
#include "report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Partial-information backward LQ solver: Riccati curves, filtered BSDE, optimal control and cost"};
  blq::RunConfig cfg;
  double dt = 0.0;
  std::string artifacts;
  app.add_option("--preset", cfg.preset, "Built-in problem (blqa, blqb)");
  app.add_option("--config", cfg.config_path, "INI problem file");
  app.add_option("--paths", cfg.n_paths, "Monte Carlo paths")->capture_default_str();
  app.add_option("--dt", dt, "Monte Carlo time step (default: config value or 1/256)");
  app.add_option("--ode-dt", cfg.ode_dt, "Riccati ODE time step")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  app.add_option("--basis-degree", cfg.basis_degree, "Regression basis degree")->capture_default_str();
  app.add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
  app.add_option("--artifacts", artifacts, "Comma-separated subset of riccati,bsde,trajectory,control,cost,diagnostics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << blq::error_record("INVALID_ARGUMENT", "cli", e.what()) << '\n';
    return 2;
  }
  if (dt > 0.0) cfg.dt = dt;
  if (!artifacts.empty() && artifacts != "all") {
    std::stringstream ss(artifacts);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) cfg.artifacts.insert(item);
  }
  if (const char* env = std::getenv("BACKWARD_LQ_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) blq::kernels::set_threads(std::min(cap, blq::kernels::max_threads()));
  }

  try {
    const blq::PipelineResult r = blq::run_pipeline(cfg);
    blq::write_artifacts(cfg, r);
    std::cout << "J_mc = " << r.cost.j_mc << " +- " << r.cost.j_mc_se << ", J_formula = " << r.cost.j_formula
              << ", Y0 = " << r.y0.transpose() << '\n';
  } catch (const blq::Error& e) {
    std::cerr << blq::error_record(blq::code_name(e.code()), e.module(), e.detail()) << '\n';
    return blq::exit_status(e.code());
  } catch (const std::exception& e) {
    std::cerr << blq::error_record("INTERNAL", "cli", e.what()) << '\n';
    return 3;
  }
  return 0;
}
