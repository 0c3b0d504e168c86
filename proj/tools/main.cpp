#include <CLI11.hpp>
#include <iostream>

#include "monofem/forward.hpp"
#include "monofem/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "monofem: monotonicity-based inclusion detection from partial-boundary "
      "Neumann-to-Dirichlet data"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_override;
  int jobs_override = 0;
  std::uint64_t seed_override = 0;
  bool have_seed = false;

  const std::vector<std::pair<std::string, std::string>> subs = {
      {"mesh", "build a mesh and write it as JSON"},
      {"phantom", "build the phantom coefficient and assumption report"},
      {"forward", "solve one Neumann problem for the phantom"},
      {"ndmap", "compute the ND operator of the phantom and its spectrum"},
      {"test", "run the inclusion test for a single candidate"},
      {"reconstruct", "sweep the candidate dictionary and intersect"},
      {"locpot", "optimize a localized boundary current"},
      {"verify", "run the monotonicity-inequality oracles"},
  };
  for (const auto& [name, desc] : subs) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("-c,--config", config_path, "JSON config file")->required();
    sub->add_option("-o,--output", output_override, "output directory override");
    sub->add_option("-j,--jobs", jobs_override, "worker thread cap");
    sub->add_option("--seed", seed_override, "seed override")
        ->each([&](const std::string&) { have_seed = true; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    monofem::RunConfig cfg = monofem::load_config(config_path);
    if (!output_override.empty()) cfg.output_dir = output_override;
    if (jobs_override > 0) cfg.jobs = jobs_override;
    if (have_seed) cfg.seed = seed_override;
    return monofem::run_subcommand(app.get_subcommands().front()->get_name(), cfg);
  } catch (const monofem::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const monofem::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
