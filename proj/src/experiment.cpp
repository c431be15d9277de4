#include "admeta/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace admeta {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kRngSalt = 0x9E3779B97F4A7C15ULL;

std::ofstream open_for_write(fs::path const &path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::ios_base::failure("cannot open " + path.string() + " for writing");
  }
  return out;
}

void check_written(std::ofstream &out, fs::path const &path)
{
  out.flush();
  if (!out) {
    throw std::ios_base::failure("write failed for " + path.string());
  }
}

BoxConstraint box_for(Problem const &problem)
{
  if (auto const *s = std::get_if<OnlineQuadraticStream>(&problem)) {
    return s->box;
  }
  return BoxConstraint::unbounded(dimension(problem));
}

} // namespace

RunResult run_experiment(RunConfig const &config)
{
  auto const clock_start = std::chrono::steady_clock::now();

  auto report = validate_hyperparams(config.hp);
  if (!report.ok()) {
    std::string msg = "invalid hyperparameters:";
    for (auto const &e : report.errors) {
      msg += " " + e + ";";
    }
    throw std::invalid_argument(msg);
  }

  Problem const problem = build_problem(config);
  auto const   *stream = std::get_if<OnlineQuadraticStream>(&problem);
  auto const   *mlp = std::get_if<TinyMlp>(&problem);
  auto const    target = optimum(problem);

  RunResult r;
  r.warnings = report.warnings;
  r.label = optimizer_label(config.optimizer, config.hp.ablation);
  r.start = initial_point(problem, config.seed);
  r.initial_loss = loss(problem, r.start);
  r.min_grad_norm_sq = grad(problem, r.start).squaredNorm();

  Optimizer opt = make_optimizer(config.optimizer, config.hp, dimension(problem), box_for(problem));
  Rng       rng(config.seed ^ kRngSalt);
  Params    theta = r.start;
  bool const lookahead = (config.optimizer == OptimizerKind::AdmetaS || config.optimizer == OptimizerKind::AdmetaR) &&
                         config.hp.ablation.use_forward;

  for (Step t = 1; t <= config.steps; ++t) {
    Params g;
    double round_loss = 0.0;
    if (stream) {
      r.played.push_back(theta);
      round_loss = stream->round_loss(t, theta);
      g = stream->round_grad(t, theta);
    } else if (mlp) {
      g = stochastic_grad(problem, theta, rng);
    } else {
      g = grad(problem, theta);
    }

    Params next = opt.step(theta, g, t);
    if (!next.allFinite()) {
      r.diverged = true;
      break;
    }
    theta = std::move(next);

    Params const full = grad(problem, theta);
    double const g2 = full.squaredNorm();
    r.min_grad_norm_sq = std::min(r.min_grad_norm_sq, g2);

    StepRecord rec;
    rec.t = t;
    rec.lr = opt.last_lr();
    rec.loss = stream ? round_loss : loss(problem, theta);
    rec.grad_norm = std::sqrt(g2);
    if (lookahead) {
      auto const info = opt.last_step();
      rec.eta = info.eta;
      rec.synced = info.synced;
    }
    if (config.snapshot_stride > 0 && t % config.snapshot_stride == 0) {
      rec.params = theta;
    }
    r.trace.append(std::move(rec));

    if (target && !r.first_hit && (theta - *target).norm() < config.hit_eps) {
      r.first_hit = t;
    }
  }

  r.final_theta = theta;
  r.final_loss = r.diverged ? std::numeric_limits<double>::infinity() : loss(problem, theta);
  if (mlp) {
    r.accuracy = mlp->accuracy(theta);
  }
  if (stream && !r.diverged && !r.played.empty()) {
    r.regret = regret(r.played, *stream, stream->comparator());
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
  return r;
}

nlohmann::json summary_json(RunConfig const &config, RunResult const &r)
{
  nlohmann::json j;
  j["optimizer"] = r.label;
  j["problem"] = config.problem;
  j["preset"] = config.preset.empty() ? nlohmann::json(nullptr) : nlohmann::json(config.preset);
  j["steps"] = config.steps;
  j["steps_completed"] = r.trace.size();
  j["seed"] = config.seed;
  j["initial_loss"] = r.initial_loss;
  j["final_loss"] = std::isfinite(r.final_loss) ? nlohmann::json(r.final_loss) : nlohmann::json(nullptr);
  j["diverged"] = r.diverged;
  j["min_grad_norm_sq"] = r.min_grad_norm_sq;
  if (optimum(build_problem(config))) {
    j["first_hit_time"] = r.first_hit ? nlohmann::json(*r.first_hit) : nlohmann::json(nullptr);
    j["hit_eps"] = config.hit_eps;
  }
  if (r.accuracy) {
    j["train_accuracy"] = *r.accuracy;
  }
  if (r.regret) {
    j["regret"] = to_json(*r.regret);
  }
  j["warnings"] = r.warnings;
  j["wall_time_s"] = r.wall_seconds;
  return j;
}

void write_run_outputs(fs::path const &dir, RunConfig const &config, RunResult const &result)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw std::ios_base::failure("cannot create " + dir.string() + ": " + ec.message());
  }
  {
    auto const path = dir / "trace.csv";
    auto       out = open_for_write(path);
    result.trace.write_csv(out);
    check_written(out, path);
  }
  {
    auto const path = dir / "summary.json";
    auto       out = open_for_write(path);
    out << summary_json(config, result).dump(2) << '\n';
    check_written(out, path);
  }
  {
    auto const path = dir / "config.txt";
    auto       out = open_for_write(path);
    out << format_key_values(to_key_values(config));
    check_written(out, path);
  }
}

std::vector<Variant> ablation_grid(RunConfig const &base)
{
  if (base.optimizer != OptimizerKind::AdmetaS && base.optimizer != OptimizerKind::AdmetaR) {
    throw std::invalid_argument("ablation grid needs AdmetaS or AdmetaR");
  }
  std::string const name = to_string(base.optimizer);
  struct Row
  {
    char const   *suffix;
    AblationFlags flags;
  };
  Row const rows[] = {
    {"", {true, true, true, false}},
    {" -DEMA", {false, true, true, false}},
    {" -LB", {true, false, true, false}},
    {" -LF", {true, true, false, false}},
    {" -LB-LF", {true, false, false, false}},
    {" w/ constant LF", {true, true, true, true}},
  };
  std::vector<Variant> out;
  for (auto const &row : rows) {
    RunConfig c = base;
    c.hp.ablation = row.flags;
    out.push_back({name + row.suffix, c});
  }
  return out;
}

std::vector<Variant> optimizer_grid(RunConfig const &base, std::vector<OptimizerKind> const &kinds)
{
  std::vector<Variant> out;
  for (auto kind : kinds) {
    RunConfig c = base;
    c.optimizer = kind;
    out.push_back({optimizer_label(kind, c.hp.ablation), c});
  }
  return out;
}

CompareTable run_compare(std::vector<Variant> const &variants, int seeds)
{
  if (variants.empty()) {
    throw std::invalid_argument("compare needs at least one configuration");
  }
  if (seeds < 1) {
    throw std::invalid_argument("compare needs seeds >= 1");
  }
  CompareTable table;
  for (int i = 0; i < seeds; ++i) {
    table.seeds.push_back(variants.front().config.seed + static_cast<std::uint64_t>(i));
  }
  for (auto const &v : variants) {
    CompareRow row;
    row.label = v.label;
    row.optimizer = optimizer_label(v.config.optimizer, v.config.hp.ablation);
    std::vector<double> ok;
    for (auto seed : table.seeds) {
      RunConfig c = v.config;
      c.seed = seed;
      try {
        auto const res = run_experiment(c);
        if (res.diverged || !std::isfinite(res.final_loss)) {
          row.failures.push_back("seed " + std::to_string(seed) + ": diverged");
          row.final_losses.push_back(std::numeric_limits<double>::infinity());
        } else {
          row.final_losses.push_back(res.final_loss);
          ok.push_back(res.final_loss);
        }
      } catch (std::exception const &e) {
        row.failures.push_back("seed " + std::to_string(seed) + ": " + e.what());
        row.final_losses.push_back(std::numeric_limits<double>::infinity());
      }
    }
    row.failed = ok.empty();
    if (!ok.empty()) {
      double sum = 0.0;
      for (double x : ok) {
        sum += x;
      }
      row.mean = sum / static_cast<double>(ok.size());
      if (ok.size() > 1) {
        // scaled so huge but finite losses do not overflow the squares
        double scale = 0.0;
        for (double x : ok) {
          scale = std::max(scale, std::abs(x - row.mean));
        }
        double ss = 0.0;
        if (scale > 0.0) {
          for (double x : ok) {
            ss += ((x - row.mean) / scale) * ((x - row.mean) / scale);
          }
        }
        row.sd = scale * std::sqrt(ss / static_cast<double>(ok.size() - 1));
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

nlohmann::json to_json(CompareTable const &table)
{
  nlohmann::json j;
  j["seeds"] = table.seeds;
  j["rows"] = nlohmann::json::array();
  for (auto const &row : table.rows) {
    nlohmann::json r;
    r["variant"] = row.label;
    r["optimizer"] = row.optimizer;
    nlohmann::json losses = nlohmann::json::array();
    for (double x : row.final_losses) {
      losses.push_back(std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr));
    }
    r["final_losses"] = losses;
    r["failures"] = row.failures;
    r["status"] = row.failed ? "failed" : (row.failures.empty() ? "ok" : "partial");
    r["mean"] = row.failed ? nlohmann::json(nullptr) : nlohmann::json(row.mean);
    r["sd"] = row.failed ? nlohmann::json(nullptr) : nlohmann::json(row.sd);
    j["rows"].push_back(r);
  }
  return j;
}

void write_compare_csv(std::ostream &out, CompareTable const &table)
{
  out << "variant,optimizer,mean_final_loss,sd_final_loss,status";
  for (auto seed : table.seeds) {
    out << ",seed_" << seed;
  }
  out << '\n';
  for (auto const &row : table.rows) {
    out << '"' << row.label << "\"," << '"' << row.optimizer << "\",";
    if (row.failed) {
      out << ",,failed";
    } else {
      out << format_number(row.mean) << ',' << format_number(row.sd) << ','
          << (row.failures.empty() ? "ok" : "partial");
    }
    for (double x : row.final_losses) {
      out << ',' << (std::isfinite(x) ? format_number(x) : "");
    }
    out << '\n';
  }
}

bool DemoResult::all_dema_not_slower() const
{
  if (status != "ok" || per_seed.empty()) {
    return false;
  }
  for (auto const &s : per_seed) {
    if (!s.dema_not_slower) {
      return false;
    }
  }
  return true;
}

namespace {

DemoMethodResult best_over_grid(QuadraticValley const &valley, Params const &start, DemoConfig const &cfg, bool dema)
{
  Problem const    problem = valley;
  Params const     target = Params::Zero(start.size());
  DemoMethodResult best;
  double           best_dist = std::numeric_limits<double>::infinity();

  for (double lr : cfg.lr_grid) {
    HyperParams hp;
    hp.alpha = lr;
    hp.beta = cfg.beta;
    hp.lambda = cfg.lambda;
    hp.ablation = AblationFlags{dema, true, false, false};
    Optimizer opt = make_optimizer(dema ? OptimizerKind::AdmetaS : OptimizerKind::SGDM, hp, start.size());

    std::vector<Params> traj{start};
    Params              theta = start;
    std::optional<Step> hit;
    for (Step t = 1; t <= cfg.steps; ++t) {
      theta = opt.step(theta, grad(problem, theta), t);
      if (!theta.allFinite()) {
        break;
      }
      traj.push_back(theta);
      if (!hit && (theta - target).norm() < cfg.eps) {
        hit = t;
      }
    }
    double const dist = (traj.back() - target).norm();
    bool const   better = hit ? (!best.hit || *hit < *best.hit) : (!best.hit && dist < best_dist);
    if (better || !best.best_lr) {
      best.best_lr = lr;
      best.hit = hit;
      best.trajectory = std::move(traj);
      best_dist = dist;
    }
  }
  return best;
}

} // namespace

DemoResult run_demo(DemoConfig const &cfg)
{
  DemoResult result;
  if (!(cfg.lambda > 0.0 && cfg.lambda < 1.0)) {
    throw std::invalid_argument("demo: lambda out of (0,1)");
  }
  auto const valley = QuadraticValley::with_condition(2, cfg.valley_cond);
  for (int i = 0; i < cfg.seeds; ++i) {
    DemoSeedResult s;
    s.seed = cfg.seed + static_cast<std::uint64_t>(i);
    s.start = initial_point(Problem{valley}, s.seed);
    if (cfg.steps > 0 && !cfg.lr_grid.empty()) {
      s.ema = best_over_grid(valley, s.start, cfg, false);
      s.dema = best_over_grid(valley, s.start, cfg, true);
      s.dema_not_slower = s.dema.hit && (!s.ema.hit || *s.dema.hit <= *s.ema.hit);
    }
    result.per_seed.push_back(std::move(s));
  }
  if (cfg.steps <= 0) {
    result.status = "error";
    result.message = "steps must be > 0";
  } else if (cfg.lr_grid.empty()) {
    result.status = "error";
    result.message = "empty learning-rate grid";
  }
  return result;
}

nlohmann::json to_json(DemoConfig const &cfg, DemoResult const &result)
{
  auto opt = [](auto const &o) { return o ? nlohmann::json(*o) : nlohmann::json(nullptr); };
  nlohmann::json j;
  j["status"] = result.status;
  if (!result.message.empty()) {
    j["message"] = result.message;
  }
  j["lambda"] = cfg.lambda;
  j["beta"] = cfg.beta;
  j["lr_grid"] = cfg.lr_grid;
  j["steps"] = cfg.steps;
  j["eps"] = cfg.eps;
  j["valley_condition"] = cfg.valley_cond;
  j["dema_not_slower_all_seeds"] = result.all_dema_not_slower();
  j["seeds"] = nlohmann::json::array();
  for (auto const &s : result.per_seed) {
    nlohmann::json e;
    e["seed"] = s.seed;
    e["start"] = {s.start[0], s.start[1]};
    e["ema"] = {{"best_lr", opt(s.ema.best_lr)}, {"first_hit_time", opt(s.ema.hit)}};
    e["dema"] = {{"best_lr", opt(s.dema.best_lr)}, {"first_hit_time", opt(s.dema.hit)}};
    e["dema_not_slower"] = s.dema_not_slower;
    j["seeds"].push_back(e);
  }
  return j;
}

void write_demo_outputs(fs::path const &dir, DemoConfig const &cfg, DemoResult const &result)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw std::ios_base::failure("cannot create " + dir.string() + ": " + ec.message());
  }
  auto const valley = QuadraticValley::with_condition(2, cfg.valley_cond);
  auto       write_traj = [&](fs::path const &path, std::vector<Params> const &traj) {
    auto out = open_for_write(path);
    out << "step,x0,x1,loss\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
      out << i << ',' << format_number(traj[i][0]) << ',' << format_number(traj[i][1]) << ','
          << format_number(loss(Problem{valley}, traj[i])) << '\n';
    }
    check_written(out, path);
  };
  for (auto const &s : result.per_seed) {
    write_traj(dir / ("ema_seed" + std::to_string(s.seed) + ".csv"), s.ema.trajectory);
    write_traj(dir / ("dema_seed" + std::to_string(s.seed) + ".csv"), s.dema.trajectory);
  }
  auto const path = dir / "verdict.json";
  auto       out = open_for_write(path);
  out << to_json(cfg, result).dump(2) << '\n';
  check_written(out, path);
}

GradcheckResult run_gradcheck(Problem const &problem, int trials, std::uint64_t seed, double h)
{
  GradcheckResult res;
  res.trials = trials;
  Rng                                    rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int i = 0; i < trials; ++i) {
    Params theta;
    if (std::holds_alternative<TinyMlp>(problem)) {
      theta = initial_point(problem, rng());
      // non-zero biases so every parameter block is exercised
      for (auto &x : theta) {
        x += 0.1 * unit(rng);
      }
    } else {
      theta.resize(dimension(problem));
      for (auto &x : theta) {
        x = std::holds_alternative<OnlineQuadraticStream>(problem) ? unit(rng) : u(rng);
      }
    }
    res.max_error = std::max(res.max_error, grad_check(problem, theta, h));
  }
  return res;
}

} // namespace admeta
