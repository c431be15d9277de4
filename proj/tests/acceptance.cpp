// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures (capped at 1).

#include "admeta/experiment.hpp"
#include "admeta/presets.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <sys/wait.h>

using namespace admeta;
namespace fs = std::filesystem;

namespace {

struct Outcome
{
  bool        pass = false;
  std::string detail;
};

std::string fmt(double x)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string slurp(fs::path const &p)
{
  std::ifstream     in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome coefficient_identities()
{
  std::mt19937_64                        rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double                                 worst_coeff = 0.0;
  double                                 worst_gain = 0.0;
  for (int i = 0; i < 10000; ++i) {
    double lam = u(rng);
    while (lam == 0.0) {
      lam = u(rng);
    }
    auto const        c = dema_coeffs(lam);
    long double const l = lam;
    long double const kappa = 10.0L / l - 9.0L;
    long double const mu = 25.0L - 10.0L * (l + 1.0L / l);
    worst_coeff = std::max(worst_coeff, double(std::abs((c.kappa - kappa) / kappa)));
    if (mu != 0.0L) {
      worst_coeff = std::max(worst_coeff, double(std::abs((c.mu - mu) / mu)));
    }
    double const gain = (6.0 - lam) / (1.0 - lam);
    worst_gain = std::max(worst_gain, std::abs(c.kappa + c.mu / (1.0 - lam) - gain) / gain);
  }
  return {worst_coeff <= 1e-12 && worst_gain <= 1e-10,
          "max coeff rel err " + fmt(worst_coeff) + ", max gain rel err " + fmt(worst_gain)};
}

Outcome steady_state_gain_check()
{
  DemaState<double> s(1, 0.9);
  Params const      g = Params::Constant(1, 1.0);
  double            h = 0.0;
  for (int t = 0; t < 2000; ++t) {
    h = dema_step(s, g)[0];
  }
  double const rel = std::abs(h - 51.0) / 51.0;
  return {rel < 0.01, "h/g = " + fmt(h) + " at t = 2000"};
}

Outcome baseline_collapse()
{
  Problem const p = TinyMlp::make(42);
  Eigen::Index  d = dimension(p);
  double        worst_s = 0.0;
  double        worst_r = 0.0;

  HyperParams hs;
  hs.alpha = 0.05;
  hs.beta = 0.9;
  hs.ablation = parse_ablation("dema,lf");
  HyperParams hsgdm = hs;
  hsgdm.ablation = {};
  Optimizer a = make_optimizer(OptimizerKind::AdmetaS, hs, d);
  Optimizer b = make_optimizer(OptimizerKind::SGDM, hsgdm, d);

  HyperParams hr;
  hr.alpha = 0.01;
  hr.ablation = parse_ablation("dema,lf");
  hr.v_update = VUpdatePolicy::Always;
  HyperParams hradam = hr;
  hradam.ablation = {};
  Optimizer c = make_optimizer(OptimizerKind::AdmetaR, hr, d);
  Optimizer e = make_optimizer(OptimizerKind::RAdam, hradam, d);

  Params ta = initial_point(p, 1), tb = ta, tc = ta, te = ta;
  Rng    rng_s(10), rng_r(20);
  for (Step t = 1; t <= 500; ++t) {
    Params const gs = stochastic_grad(p, ta, rng_s);
    ta = a.step(ta, gs, t);
    tb = b.step(tb, gs, t);
    worst_s = std::max(worst_s, (ta - tb).lpNorm<Eigen::Infinity>());
    Params const gr = stochastic_grad(p, tc, rng_r);
    tc = c.step(tc, gr, t);
    te = e.step(te, gr, t);
    worst_r = std::max(worst_r, (tc - te).lpNorm<Eigen::Infinity>());
  }
  return {worst_s <= 1e-12 && worst_r <= 1e-12,
          "AdmetaS vs SGDM max |diff| " + fmt(worst_s) + ", AdmetaR vs RAdam max |diff| " + fmt(worst_r)};
}

Outcome radam_branches()
{
  RadamState<double>               s(1, 0.999);
  Params                           theta = Params::Zero(1);
  bool                             ok = true;
  Step                             first = 0;
  double                           r_lo = 1.0, r_hi = 0.0;
  std::mt19937_64                  rng(4);
  std::normal_distribution<double> n;
  for (Step t = 1; t <= 10000; ++t) {
    theta = radam_step(s, theta, Params(Params::Constant(1, n(rng))), 1e-3, 0.9, 0.999, 1e-8);
    // required pattern: un-adapted for t in {1, 2, 3}, rectified from t = 4 on
    ok = ok && (s.last.tractable == (t >= 4));
    if (s.last.tractable) {
      first = first == 0 ? t : first;
      r_lo = std::min(r_lo, s.last.r);
      r_hi = std::max(r_hi, s.last.r);
    }
  }
  double const r_inf = rectifier(rho_at(0.999, 1000000), rho_infinity(0.999));
  ok = ok && r_lo > 0.0 && r_hi < 1.0 && std::abs(r_inf - 1.0) < 1e-3;
  return {ok, "first rectified step t = " + std::to_string(first) + " (rho_4 = " + fmt(rho_at(0.999, 4)) +
                ", rho_5 = " + fmt(rho_at(0.999, 5)) + "), r in [" + fmt(r_lo) + ", " + fmt(r_hi) +
                "], |r(1e6) - 1| = " + fmt(std::abs(r_inf - 1.0))};
}

Outcome eta_schedules()
{
  auto const d05 = EtaSchedule::dyn05();
  auto const d08 = EtaSchedule::dyn08();
  bool       ok = eta_at(d05, 0) == 1.0 && eta_at(d08, 4) == 1.0;
  for (Step t = 4; t < 200000; ++t) {
    ok = ok && eta_at(d05, t + 1) < eta_at(d05, t) && eta_at(d08, t + 1) < eta_at(d08, t);
  }
  double const e05 = eta_at(d05, 100000000);
  double const e08 = eta_at(d08, 100000000);
  ok = ok && std::abs(e05 - 0.5) < 1e-3 && std::abs(e08 - 0.8) < 1e-3;
  return {ok, "Dyn05(1e8) = " + fmt(e05) + ", Dyn08(1e8) = " + fmt(e08)};
}

Outcome regret_sublinear()
{
  std::string detail;
  bool        ok = true;
  for (std::string kind : {"AdmetaS", "AdmetaR"}) {
    KeyValues kv{{"problem", "online"}, {"optimizer", kind}, {"steps", "5000"}, {"lr", "0.05"},
                 {"lr-schedule", "invsqrt"}, {"snapshot-stride", "0"}};
    if (kind == "AdmetaS") {
      kv["lambda"] = "0.9";
      kv["beta"] = "0.2";
    } else {
      kv["lambda"] = "0.1";
    }
    int passes = 0;
    detail += kind + " p =";
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      RunConfig c = config_from_key_values(kv);
      c.seed = seed;
      auto const r = run_experiment(c);
      if (r.regret && r.regret->fit) {
        detail += " " + fmt(r.regret->fit->exponent);
        passes += r.regret->fit->exponent <= 0.75 ? 1 : 0;
      } else {
        detail += " undef";
      }
    }
    detail += "; ";
    ok = ok && passes >= 4;
  }
  return {ok, detail};
}

Outcome nonconvex_decay()
{
  RunConfig c = config_from_key_values({{"preset", "admetas-cifar10-resnet"}, {"problem", "rosenbrock"},
                                        {"lr", "1e-4"}, {"steps", "20000"}, {"snapshot-stride", "1"}});
  auto const r = run_experiment(c);
  auto const rate = min_grad_norm_series(r.trace, build_problem(c));
  bool       monotone = true;
  for (std::size_t i = 1; i < rate.running_min.size(); ++i) {
    monotone = monotone && rate.running_min[i] <= rate.running_min[i - 1];
  }
  double const last = rate.running_min.empty() ? INFINITY : rate.running_min.back();
  return {!r.diverged && monotone && last < 1e-2 && rate.running_min.size() == 20000,
          "min ||grad||^2 = " + fmt(last) + (monotone ? ", non-increasing" : ", NOT monotone")};
}

int run_cli(std::string const &args)
{
  std::string const cmd = std::string(ADMETA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int const         status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome demo_reproduction()
{
  auto const dir = fs::temp_directory_path() / "admeta_acceptance_demo";
  fs::remove_all(dir);
  int const code = run_cli("demo-ema-dema --out " + dir.string());
  auto      verdict = nlohmann::json::parse(slurp(dir / "verdict.json"), nullptr, false);
  if (verdict.is_discarded()) {
    return {false, "no verdict.json (exit " + std::to_string(code) + ")"};
  }
  int         wins = 0;
  std::string detail = "hits (ema/dema):";
  for (auto const &s : verdict["seeds"]) {
    auto hit = [](nlohmann::json const &h) { return h.is_null() ? std::string("none") : h.dump(); };
    detail += " " + hit(s["ema"]["first_hit_time"]) + "/" + hit(s["dema"]["first_hit_time"]);
    wins += s["dema_not_slower"].get<bool>() ? 1 : 0;
  }
  fs::remove_all(dir);
  return {code == 0 && wins == 5 && verdict["seeds"].size() == 5, detail + "; " + std::to_string(wins) + "/5"};
}

Outcome gradient_oracle()
{
  auto const r = run_gradcheck(TinyMlp::make(42), 100, 1);
  return {r.max_error < 1e-4, "max rel err " + fmt(r.max_error) + " over " + std::to_string(r.trials) + " points"};
}

Outcome determinism()
{
  auto const root = fs::temp_directory_path() / "admeta_acceptance_det";
  fs::remove_all(root);
  int runs = 0;
  int same = 0;
  for (std::string problem : {"valley", "rosenbrock", "online", "tinymlp"}) {
    for (std::string opt : {"SGDM", "Adam", "RAdam", "AdmetaS", "AdmetaR"}) {
      RunConfig c = config_from_key_values(
        {{"problem", problem}, {"optimizer", opt}, {"steps", "300"}, {"seed", "9"}, {"lr", "1e-3"}});
      for (char const *tag : {"a", "b"}) {
        write_run_outputs(root / (problem + opt + tag), c, run_experiment(c));
      }
      ++runs;
      same += slurp(root / (problem + opt + "a") / "trace.csv") == slurp(root / (problem + opt + "b") / "trace.csv")
                ? 1
                : 0;
    }
  }
  fs::remove_all(root);
  return {same == runs, std::to_string(same) + "/" + std::to_string(runs) + " configs byte-identical"};
}

Outcome ablation_grid_check()
{
  RunConfig base = config_from_key_values(
    {{"preset", "admetas-cifar10-resnet"}, {"problem", "valley"}, {"valley-scale", "0.01"}, {"steps", "2000"},
     {"snapshot-stride", "0"}});
  auto const  grid = ablation_grid(base);
  auto const  table = run_compare(grid, 5);
  std::vector<std::string> const expected = {"AdmetaS", "AdmetaS -DEMA", "AdmetaS -LB", "AdmetaS -LF",
                                             "AdmetaS -LB-LF", "AdmetaS w/ constant LF"};
  bool labels_ok = table.rows.size() == expected.size();
  for (std::size_t i = 0; labels_ok && i < expected.size(); ++i) {
    labels_ok = table.rows[i].label == expected[i];
  }
  int wins = 0;
  for (std::size_t s = 0; s < table.seeds.size(); ++s) {
    double const full = table.rows[0].final_losses[s];
    bool         best = std::isfinite(full);
    for (std::size_t r = 1; r < table.rows.size(); ++r) {
      best = best && full <= table.rows[r].final_losses[s];
    }
    wins += best ? 1 : 0;
  }
  std::string detail = labels_ok ? "6 labels ok" : "labels wrong";
  detail += "; full best in " + std::to_string(wins) + "/5 seeds; mean final loss:";
  for (auto const &row : table.rows) {
    detail += " [" + row.label + "] " + (row.failed ? std::string("failed") : fmt(row.mean));
  }
  return {labels_ok && wins >= 3, detail};
}

} // namespace

int main()
{
  struct Criterion
  {
    int                      id;
    char const              *name;
    double                   limit_s;
    std::function<Outcome()> check;
  };
  std::vector<Criterion> const criteria = {
    {1, "coefficient identities", 1.0, coefficient_identities},
    {2, "steady-state gain", 1.0, steady_state_gain_check},
    {3, "baseline collapse", 5.0, baseline_collapse},
    {4, "RAdam branch", 1.0, radam_branches},
    {5, "dynamic lookahead schedules", 1.0, eta_schedules},
    {6, "regret sublinearity", 30.0, regret_sublinear},
    {7, "non-convex decay", 10.0, nonconvex_decay},
    {8, "EMA vs DEMA demo", 10.0, demo_reproduction},
    {9, "gradient oracle", 5.0, gradient_oracle},
    {10, "determinism", 5.0, determinism},
    {11, "ablation grid", 60.0, ablation_grid_check},
  };
  int failures = 0;
  for (auto const &c : criteria) {
    auto const start = std::chrono::steady_clock::now();
    Outcome    out;
    try {
      out = c.check();
    } catch (std::exception const &e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool const   in_time = secs < c.limit_s;
    bool const   pass = out.pass && in_time;
    failures += pass ? 0 : 1;
    std::cout << "criterion " << c.id << " " << (pass ? "PASS" : "FAIL") << "  " << c.name << ": " << out.detail
              << " (" << fmt(secs) << " s" << (in_time ? "" : ", over " + fmt(c.limit_s) + " s limit") << ")"
              << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
