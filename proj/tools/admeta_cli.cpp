#include "admeta/experiment.hpp"
#include "admeta/presets.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace admeta;

namespace {

enum Exit : int
{
  kOk = 0,
  kThreshold = 1,
  kUsage = 2,
  kIo = 3,
};

struct ConfigArgs
{
  std::string                        file;
  std::map<std::string, std::string> flags;
};

void add_config_flags(CLI::App *app, ConfigArgs &args)
{
  app->add_option("--config", args.file, "key = value config file; flags override it");
  for (auto const &key : config_keys()) {
    app->add_option("--" + key, args.flags[key]);
  }
}

RunConfig resolve(CLI::App const *app, ConfigArgs const &args, KeyValues kv = {})
{
  if (!args.file.empty()) {
    std::ifstream in(args.file);
    if (!in) {
      throw std::ios_base::failure("cannot read config " + args.file);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    for (auto const &[key, value] : parse_key_values(ss.str())) {
      kv[key] = value;
    }
  }
  for (auto const &[key, value] : args.flags) {
    if (app->count("--" + key) > 0) {
      kv[key] = value;
    }
  }
  return config_from_key_values(kv);
}

void warn(std::vector<std::string> const &warnings)
{
  for (auto const &w : warnings) {
    std::cerr << "warning: " << w << '\n';
  }
}

int cmd_run(RunConfig const &config)
{
  warn(validate_hyperparams(config.hp).warnings);
  for (int i = 0; i < config.seeds; ++i) {
    RunConfig c = config;
    c.seed = config.seed + static_cast<std::uint64_t>(i);
    fs::path dir = config.out;
    if (config.seeds > 1) {
      dir /= "seed_" + std::to_string(c.seed);
    }
    auto const result = run_experiment(c);
    write_run_outputs(dir, c, result);
    std::cout << result.label << " seed " << c.seed << ": final_loss " << format_number(result.final_loss);
    if (result.first_hit) {
      std::cout << " first_hit " << *result.first_hit;
    }
    if (result.diverged) {
      std::cout << " (diverged)";
    }
    std::cout << " -> " << (dir / "trace.csv").string() << '\n';
  }
  return kOk;
}

std::vector<OptimizerKind> parse_kind_list(std::string const &list)
{
  std::vector<OptimizerKind> kinds;
  std::stringstream          ss(list);
  std::string                item;
  while (std::getline(ss, item, ',')) {
    kinds.push_back(parse_optimizer_kind(item));
  }
  if (kinds.empty()) {
    throw std::invalid_argument("empty optimizer list");
  }
  return kinds;
}

int cmd_compare(RunConfig const &config, std::string const &grid)
{
  std::vector<Variant> variants;
  if (grid == "ablation") {
    variants = ablation_grid(config);
  } else if (grid.rfind("optimizers:", 0) == 0) {
    variants = optimizer_grid(config, parse_kind_list(grid.substr(11)));
  } else if (grid == "single") {
    variants.push_back({optimizer_label(config.optimizer, config.hp.ablation), config});
  } else {
    throw std::invalid_argument("unknown grid '" + grid + "'");
  }
  auto const table = run_compare(variants, config.seeds);

  std::error_code ec;
  fs::create_directories(config.out, ec);
  if (ec) {
    throw std::ios_base::failure("cannot create " + config.out + ": " + ec.message());
  }
  {
    std::ofstream out(fs::path(config.out) / "compare.json");
    out << to_json(table).dump(2) << '\n';
    if (!out) {
      throw std::ios_base::failure("cannot write compare.json");
    }
  }
  {
    std::ofstream out(fs::path(config.out) / "compare.csv");
    write_compare_csv(out, table);
    if (!out) {
      throw std::ios_base::failure("cannot write compare.csv");
    }
  }
  write_compare_csv(std::cout, table);
  return kOk;
}

int cmd_demo(DemoConfig const &cfg, std::string const &out)
{
  auto const result = run_demo(cfg);
  write_demo_outputs(out, cfg, result);
  for (auto const &s : result.per_seed) {
    auto hit = [](std::optional<Step> const &h) { return h ? std::to_string(*h) : std::string("none"); };
    std::cout << "seed " << s.seed << ": ema " << hit(s.ema.hit) << " dema " << hit(s.dema.hit)
              << (s.dema_not_slower ? "  ok" : "  FAIL") << '\n';
  }
  if (result.status != "ok") {
    std::cerr << "demo: " << result.message << '\n';
    return kThreshold;
  }
  std::cout << "verdict: " << (result.all_dema_not_slower() ? "DEMA not slower on every seed" : "EMA faster on some seed")
            << '\n';
  return result.all_dema_not_slower() ? kOk : kThreshold;
}

int cmd_gradcheck(std::string const &problem, int trials, std::uint64_t seed, double threshold)
{
  RunConfig const c = config_from_key_values({{"problem", problem}});
  auto const res = run_gradcheck(build_problem(c), trials, seed);
  std::cout << problem << ": max relative error " << format_number(res.max_error) << " over " << res.trials
            << " points\n";
  return res.max_error < threshold ? kOk : kThreshold;
}

int cmd_presets()
{
  for (auto const &p : presets()) {
    std::cout << p.name << "  " << optimizer_label(p.optimizer, p.hp.ablation) << "  lr=" << format_number(p.hp.alpha);
    if (p.optimizer == OptimizerKind::AdmetaS || p.optimizer == OptimizerKind::SGDM) {
      std::cout << " beta=" << format_number(p.hp.beta);
    }
    if (p.optimizer == OptimizerKind::AdmetaS || p.optimizer == OptimizerKind::AdmetaR) {
      std::cout << " lambda=" << format_number(p.hp.lambda) << " k=" << p.hp.k
                << " eta=" << format_eta_schedule(p.hp.eta_schedule);
    }
    if (p.optimizer != OptimizerKind::SGD && p.optimizer != OptimizerKind::SGDM && p.optimizer != OptimizerKind::AdmetaS) {
      std::cout << " beta1=" << format_number(p.hp.beta1) << " beta2=" << format_number(p.hp.beta2)
                << " eps=" << format_number(p.hp.epsilon);
    }
    std::cout << " wd=" << format_number(p.hp.weight_decay);
    if (!p.note.empty()) {
      std::cout << "  # " << p.note;
    }
    std::cout << '\n';
  }
  return kOk;
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Admeta optimizer experiments"};
  app.require_subcommand(1);

  ConfigArgs run_args;
  auto      *run = app.add_subcommand("run", "run one configuration and write trace.csv and summary.json");
  add_config_flags(run, run_args);

  ConfigArgs  cmp_args;
  std::string grid = "ablation";
  auto       *compare = app.add_subcommand("compare", "multi-seed comparison grid");
  add_config_flags(compare, cmp_args);
  compare->add_option("--grid", grid, "ablation | optimizers:<kind,...> | single");

  DemoConfig  demo_cfg;
  std::string demo_out = "demo";
  auto       *demo = app.add_subcommand("demo-ema-dema", "EMA vs DEMA momentum on the 2-D valley");
  demo->add_option("--lambda", demo_cfg.lambda);
  demo->add_option("--beta", demo_cfg.beta);
  demo->add_option("--lr-grid", demo_cfg.lr_grid)->delimiter(',');
  demo->add_option("--steps", demo_cfg.steps);
  demo->add_option("--seed", demo_cfg.seed);
  demo->add_option("--seeds", demo_cfg.seeds)->check(CLI::PositiveNumber);
  demo->add_option("--hit-eps", demo_cfg.eps)->check(CLI::PositiveNumber);
  demo->add_option("--valley-cond", demo_cfg.valley_cond)->check(CLI::PositiveNumber);
  demo->add_option("--out", demo_out);

  std::string   gc_problem;
  int           gc_trials = 100;
  std::uint64_t gc_seed = 1;
  double        gc_threshold = 1e-4;
  auto         *gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
  gradcheck->add_option("problem", gc_problem, "valley | rosenbrock | online | tinymlp")->required();
  gradcheck->add_option("--trials", gc_trials)->check(CLI::PositiveNumber);
  gradcheck->add_option("--seed", gc_seed);
  gradcheck->add_option("--threshold", gc_threshold);

  auto *list = app.add_subcommand("presets", "list the named hyperparameter presets");

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const &e) {
    int const code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) {
      return cmd_run(resolve(run, run_args));
    }
    if (*compare) {
      return cmd_compare(resolve(compare, cmp_args, {{"seeds", "5"}}), grid);
    }
    if (*demo) {
      return cmd_demo(demo_cfg, demo_out);
    }
    if (*gradcheck) {
      return cmd_gradcheck(gc_problem, gc_trials, gc_seed, gc_threshold);
    }
    if (*list) {
      return cmd_presets();
    }
  } catch (std::ios_base::failure const &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (std::exception const &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
