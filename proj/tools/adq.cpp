#include <CLI11.hpp>

#include <iostream>

#include "adq/commands.hpp"
#include "adq/parallel.hpp"

namespace {

using Command = int (*)(const adq::ExperimentConfig&, const adq::RunOptions&, std::ostream&);

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantization diagnostics for Ahlfors-David regular measures"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool plots = false;
  int threads = 0;

  struct Entry {
    const char* name;
    const char* help;
    Command fn;
  };
  const Entry entries[] = {
      {"probe", "Ahlfors-David regularity probe", adq::cmd_probe},
      {"pack", "maximal packings over a range of levels", adq::cmd_pack},
      {"optimize", "optimise codebooks for every n", adq::cmd_optimize},
      {"sweep", "error curve, cell statistics, bands and dimension", adq::cmd_sweep},
      {"structural", "desk-scale structural checks against a packing", adq::cmd_structural},
      {"oracle", "compare the optimiser with exhaustive search on random discrete measures", adq::cmd_oracle},
  };
  std::vector<std::pair<CLI::App*, Command>> commands;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "seed (overrides the config)");
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_flag("--plots", plots, "also write SVG plots");
    sub->add_option("--threads", threads, "worker threads (0: hardware)")->check(CLI::NonNegativeNumber);
    commands.emplace_back(sub, e.fn);
  }

  adq::BoundsParams bounds;
  std::string variant = "recursive";
  CLI::App* bsub = app.add_subcommand("bounds", "evaluate the explicit constants");
  bsub->add_option("--q", bounds.q, "dimension")->check(CLI::PositiveNumber);
  bsub->add_option("--C1", bounds.C1, "lower regularity constant (decimal or a/b)");
  bsub->add_option("--C2", bounds.C2, "upper regularity constant");
  bsub->add_option("--m", bounds.m, "packing base");
  bsub->add_option("--s0", bounds.s0, "regularity exponent");
  bsub->add_option("--r", bounds.r, "quantization order");
  bsub->add_option("--zeta", variant, "zeta variant: recursive or literal")
      ->check(CLI::IsMember({"recursive", "literal"}));
  bsub->add_option("--out", bounds.out_dir, "directory for bounds.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : adq::kExitConfig;
  }
  adq::set_thread_count(threads);

  if (bsub->parsed()) {
    bounds.variant = variant == "literal" ? adq::ZetaVariant::Literal : adq::ZetaVariant::Recursive;
    return adq::run_guarded([&] { return adq::cmd_bounds(bounds, std::cout); }, std::cerr);
  }
  for (const auto& [sub, fn] : commands) {
    if (!sub->parsed()) continue;
    return adq::run_guarded(
        [&, fn = fn] {
          adq::ExperimentConfig cfg = adq::load_config(config_path);
          if (seed) cfg.seed = seed;
          return fn(cfg, adq::RunOptions{out_dir, plots}, std::cout);
        },
        std::cerr);
  }
  return adq::kExitConfig;
}
