#include "admeta/run_config.hpp"

#include "admeta/presets.hpp"
#include "admeta/trace.hpp"

#include <sstream>
#include <stdexcept>

namespace admeta {

namespace {

std::string trim(std::string const &s)
{
  auto const b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  auto const e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(std::string const &key, std::string const &v)
{
  std::size_t pos = 0;
  double      x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (std::exception const &) {
    pos = 0;
  }
  if (pos != v.size() || v.empty()) {
    throw std::invalid_argument(key + ": expected a number, got '" + v + "'");
  }
  return x;
}

long long to_int(std::string const &key, std::string const &v)
{
  std::size_t pos = 0;
  long long   x = 0;
  try {
    x = std::stoll(v, &pos);
  } catch (std::exception const &) {
    pos = 0;
  }
  if (pos != v.size() || v.empty()) {
    throw std::invalid_argument(key + ": expected an integer, got '" + v + "'");
  }
  return x;
}

bool to_bool(std::string const &key, std::string const &v)
{
  if (v == "true" || v == "1" || v == "yes" || v == "on") {
    return true;
  }
  if (v == "false" || v == "0" || v == "no" || v == "off") {
    return false;
  }
  throw std::invalid_argument(key + ": expected a boolean, got '" + v + "'");
}

std::string num(double x) { return format_number(x); }

} // namespace

std::vector<std::string> const &config_keys()
{
  static std::vector<std::string> const keys = {
    "problem", "dim",   "valley-cond", "valley-scale", "samples",      "hidden",  "batch",          "data-seed",
    "stream-noise", "preset", "optimizer",   "lr",           "lr-schedule",  "lambda",  "beta",           "beta1",
    "beta2",   "eps",   "k",           "eta-schedule", "phi-init",     "nesterov", "bias-correct",  "weight-decay",
    "ablate",  "v-update", "steps",     "seed",         "seeds",        "snapshot-stride", "hit-eps", "out"};
  return keys;
}

KeyValues parse_key_values(std::string const &text)
{
  KeyValues          kv;
  std::istringstream in(text);
  std::string        line;
  int                lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) {
      key.erase(0, 2);
    }
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::string format_key_values(KeyValues const &kv)
{
  std::ostringstream out;
  for (auto const &key : config_keys()) {
    if (auto it = kv.find(key); it != kv.end()) {
      out << key << " = " << it->second << '\n';
    }
  }
  for (auto const &[key, value] : kv) {
    bool known = false;
    for (auto const &k : config_keys()) {
      known = known || k == key;
    }
    if (!known) {
      out << key << " = " << value << '\n';
    }
  }
  return out.str();
}

RunConfig config_from_key_values(KeyValues const &kv)
{
  RunConfig c;
  for (auto const &[key, value] : kv) {
    bool known = false;
    for (auto const &k : config_keys()) {
      known = known || k == key;
    }
    if (!known) {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }

  if (auto it = kv.find("preset"); it != kv.end() && !it->second.empty() && it->second != "none") {
    auto p = find_preset(it->second);
    if (!p) {
      throw std::invalid_argument("unknown preset '" + it->second + "'");
    }
    c.preset = p->name;
    c.optimizer = p->optimizer;
    c.hp = p->hp;
  }

  for (auto const &[key, v] : kv) {
    if (key == "preset") {
      continue;
    } else if (key == "problem") {
      if (v != "valley" && v != "rosenbrock" && v != "online" && v != "tinymlp") {
        throw std::invalid_argument("unknown problem '" + v + "'");
      }
      c.problem = v;
    } else if (key == "dim") {
      c.dim = to_int(key, v);
    } else if (key == "valley-cond") {
      c.valley_cond = to_double(key, v);
    } else if (key == "valley-scale") {
      c.valley_scale = to_double(key, v);
    } else if (key == "samples") {
      c.samples = to_int(key, v);
    } else if (key == "hidden") {
      c.hidden = to_int(key, v);
    } else if (key == "batch") {
      c.batch = to_int(key, v);
    } else if (key == "data-seed") {
      c.data_seed = static_cast<std::uint64_t>(to_int(key, v));
    } else if (key == "stream-noise") {
      c.stream_noise = to_double(key, v);
    } else if (key == "optimizer") {
      c.optimizer = parse_optimizer_kind(v);
    } else if (key == "lr") {
      c.hp.alpha = to_double(key, v);
    } else if (key == "lr-schedule") {
      c.hp.lr_schedule = parse_lr_schedule(v, c.hp.alpha);
    } else if (key == "lambda") {
      c.hp.lambda = to_double(key, v);
    } else if (key == "beta") {
      c.hp.beta = to_double(key, v);
    } else if (key == "beta1") {
      c.hp.beta1 = to_double(key, v);
    } else if (key == "beta2") {
      c.hp.beta2 = to_double(key, v);
    } else if (key == "eps") {
      c.hp.epsilon = to_double(key, v);
    } else if (key == "k") {
      c.hp.k = static_cast<int>(to_int(key, v));
    } else if (key == "eta-schedule") {
      c.hp.eta_schedule = parse_eta_schedule(v);
    } else if (key == "phi-init") {
      if (v == "current") {
        c.hp.phi_init = PhiInit::Current;
      } else if (v == "zero") {
        c.hp.phi_init = PhiInit::Zero;
      } else {
        throw std::invalid_argument("phi-init: expected current or zero, got '" + v + "'");
      }
    } else if (key == "nesterov") {
      c.hp.nesterov = to_bool(key, v);
    } else if (key == "bias-correct") {
      c.hp.bias_correct = to_bool(key, v);
    } else if (key == "weight-decay") {
      c.hp.weight_decay = to_double(key, v);
    } else if (key == "ablate") {
      c.hp.ablation = parse_ablation(v);
    } else if (key == "v-update") {
      c.hp.v_update = parse_v_update(v);
    } else if (key == "steps") {
      c.steps = to_int(key, v);
    } else if (key == "seed") {
      c.seed = static_cast<std::uint64_t>(to_int(key, v));
    } else if (key == "seeds") {
      c.seeds = static_cast<int>(to_int(key, v));
    } else if (key == "snapshot-stride") {
      c.snapshot_stride = static_cast<int>(to_int(key, v));
    } else if (key == "hit-eps") {
      c.hit_eps = to_double(key, v);
    } else if (key == "out") {
      c.out = v;
    }
  }
  if (c.steps < 0) {
    throw std::invalid_argument("steps must be >= 0");
  }
  if (c.seeds < 1) {
    throw std::invalid_argument("seeds must be >= 1");
  }
  if (c.snapshot_stride < 0) {
    throw std::invalid_argument("snapshot-stride must be >= 0");
  }
  if (c.dim < 1) {
    throw std::invalid_argument("dim must be >= 1");
  }
  if (c.problem == "rosenbrock" && c.dim % 2 != 0) {
    throw std::invalid_argument("rosenbrock needs an even dimension");
  }
  return c;
}

KeyValues to_key_values(RunConfig const &c)
{
  KeyValues kv;
  kv["problem"] = c.problem;
  kv["dim"] = std::to_string(c.dim);
  kv["valley-cond"] = num(c.valley_cond);
  kv["valley-scale"] = num(c.valley_scale);
  kv["samples"] = std::to_string(c.samples);
  kv["hidden"] = std::to_string(c.hidden);
  kv["batch"] = std::to_string(c.batch);
  kv["data-seed"] = std::to_string(c.data_seed);
  kv["stream-noise"] = num(c.stream_noise);
  kv["preset"] = c.preset.empty() ? "none" : c.preset;
  kv["optimizer"] = to_string(c.optimizer);
  kv["lr"] = num(c.hp.alpha);
  kv["lr-schedule"] = format_lr_schedule(c.hp.lr_schedule);
  kv["lambda"] = num(c.hp.lambda);
  kv["beta"] = num(c.hp.beta);
  kv["beta1"] = num(c.hp.beta1);
  kv["beta2"] = num(c.hp.beta2);
  kv["eps"] = num(c.hp.epsilon);
  kv["k"] = std::to_string(c.hp.k);
  kv["eta-schedule"] = format_eta_schedule(c.hp.eta_schedule);
  kv["phi-init"] = c.hp.phi_init == PhiInit::Zero ? "zero" : "current";
  kv["nesterov"] = c.hp.nesterov ? "true" : "false";
  kv["bias-correct"] = c.hp.bias_correct ? "true" : "false";
  kv["weight-decay"] = num(c.hp.weight_decay);
  kv["ablate"] = format_ablation(c.hp.ablation);
  kv["v-update"] = format_v_update(c.hp.v_update);
  kv["steps"] = std::to_string(c.steps);
  kv["seed"] = std::to_string(c.seed);
  kv["seeds"] = std::to_string(c.seeds);
  kv["snapshot-stride"] = std::to_string(c.snapshot_stride);
  kv["hit-eps"] = num(c.hit_eps);
  kv["out"] = c.out;
  return kv;
}

bool operator==(RunConfig const &a, RunConfig const &b) { return to_key_values(a) == to_key_values(b); }

Problem build_problem(RunConfig const &c)
{
  if (c.problem == "valley") {
    return QuadraticValley::with_condition(c.dim, c.valley_cond, c.valley_scale);
  }
  if (c.problem == "rosenbrock") {
    return Rosenbrock{c.dim};
  }
  if (c.problem == "online") {
    return OnlineQuadraticStream::generate(c.seed, std::max<Step>(c.steps, 1), c.dim, c.stream_noise);
  }
  if (c.problem == "tinymlp") {
    auto mlp = TinyMlp::make(c.data_seed, c.samples, c.hidden);
    mlp.batch_size = c.batch;
    return mlp;
  }
  throw std::invalid_argument("unknown problem '" + c.problem + "'");
}

} // namespace admeta
