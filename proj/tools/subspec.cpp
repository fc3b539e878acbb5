#include <CLI11.hpp>

#include <iostream>

#include "subspec/cli.hpp"

using namespace subspec;

int main(int argc, char** argv) {
  CLI::App app{"subspec: discreteness of spectra for sub-Laplacian Schrodinger operators"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string out = "subspec-out";
  app.add_option("--seed", seed, "RNG seed (overrides the config's \"seed\")");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", out, "output directory");

  std::string config_path, group;
  std::vector<std::string> potential;

  auto* decide = app.add_subcommand("decide-poly", "symbolic verdict for a polynomial potential");
  decide->add_option("--config", config_path, "JSON config")->check(CLI::ExistingFile);
  decide->add_option("--group", group, "preset (heisenberg:n, euclidean:d, engel) or definition file");
  decide->add_option("--potential", potential, "polynomial; repeat for a vector-valued potential");

  auto* scan = app.add_subcommand("eigen-scan", "bottom of the spectrum on translated balls, tail mass");
  auto* muck = app.add_subcommand("muck-check", "local Muckenhoupt certificates and ball integral growth");
  auto* wt = app.add_subcommand("weight-transform", "weighted sub-Laplacian against its Schrodinger potential");
  for (auto* s : {scan, muck, wt}) s->add_option("--config", config_path, "JSON config")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : cli::kUsage;
  }

  cli::RunContext ctx;
  ctx.out = out;
  ctx.threads = threads;
  try {
    nlohmann::json cfg = config_path.empty() ? nlohmann::json::object() : cli::read_config(config_path);
    if (!cfg.is_object()) throw Error(ErrorKind::InvalidArgument, "config must be a JSON object");
    if (!group.empty()) cfg["group"] = group;
    if (potential.size() == 1) cfg["potential"] = potential.front();
    else if (potential.size() > 1) cfg["potential"] = potential;
    if (seed) cfg["seed"] = *seed;
    ctx.seed = cli::take<std::uint64_t>(cfg, "seed", 1);
    ctx.config = std::move(cfg);

    if (decide->parsed()) {
      ctx.subcommand = "decide-poly";
      return cli::decide_poly(ctx, std::cout);
    }
    if (scan->parsed()) {
      ctx.subcommand = "eigen-scan";
      return cli::eigen_scan(ctx, std::cout);
    }
    if (muck->parsed()) {
      ctx.subcommand = "muck-check";
      return cli::muck_check(ctx, std::cout);
    }
    ctx.subcommand = "weight-transform";
    return cli::weight_transform(ctx, std::cout);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kUsage;
  }
}
