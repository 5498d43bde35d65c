#include "swnudge/config.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace swnudge {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

using Raw = std::map<std::string, std::map<std::string, std::string>>;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> k = {
      {"grid", {"nx", "ny", "dx", "dy"}},
      {"model",
       {"kind", "dt", "n_steps", "g_reduced", "h_bar", "f0", "beta", "friction", "viscosity",
        "alpha_a", "alpha_tau", "tau_max", "rho", "coriolis_length", "wind", "force_cfl",
        "snapshot_every", "init", "spinup_steps", "snapshot_prefix", "amplitude_h", "amplitude_v",
        "modes"}},
      {"observer", {"kernel", "alpha", "beta_h", "beta_v", "truncation_radius", "model"}},
      {"noise", {"fraction", "seed"}},
      {"sweep", {"alphas", "beta_hs", "noises", "dts"}},
  };
  return k;
}

Raw parse_raw(const std::string& text) {
  Raw raw;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.erase(cut);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header at " + where);
      section = trim(line.substr(1, line.size() - 2));
      if (!known_keys().count(section))
        throw ConfigError("unknown section [" + section + "] at " + where);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value at " + where);
    if (section.empty()) throw ConfigError("key outside any section at " + where);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_keys().at(section).count(key))
      throw ConfigError("unknown key '" + key + "' in section [" + section + "] at " + where);
    if (raw[section].count(key))
      throw ConfigError("duplicate key '" + section + "." + key + "' at " + where);
    raw[section][key] = value;
  }
  return raw;
}

class Resolver {
 public:
  explicit Resolver(Raw raw) : raw_(std::move(raw)) {}

  bool has(const std::string& sec, const std::string& key) const {
    const auto s = raw_.find(sec);
    return s != raw_.end() && s->second.count(key);
  }
  std::string str(const std::string& sec, const std::string& key, const std::string& dflt) const {
    return has(sec, key) ? raw_.at(sec).at(key) : dflt;
  }
  double num(const std::string& sec, const std::string& key, double dflt) const {
    if (!has(sec, key)) return dflt;
    return to_num(raw_.at(sec).at(key), sec + "." + key);
  }
  long integer(const std::string& sec, const std::string& key, long dflt) const {
    if (!has(sec, key)) return dflt;
    const std::string& v = raw_.at(sec).at(key);
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
      throw ConfigError("expected an integer for " + sec + "." + key + ", got '" + v + "'");
    return x;
  }
  std::uint64_t u64(const std::string& sec, const std::string& key, std::uint64_t dflt) const {
    if (!has(sec, key)) return dflt;
    const std::string& v = raw_.at(sec).at(key);
    char* end = nullptr;
    const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
      throw ConfigError("expected an unsigned integer for " + sec + "." + key + ", got '" + v +
                        "'");
    return x;
  }
  bool boolean(const std::string& sec, const std::string& key, bool dflt) const {
    if (!has(sec, key)) return dflt;
    std::string v = raw_.at(sec).at(key);
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("expected a boolean for " + sec + "." + key + ", got '" + v + "'");
  }
  std::vector<double> numbers(const std::string& sec, const std::string& key,
                              std::vector<double> dflt) const {
    if (!has(sec, key)) return dflt;
    const std::string& v = raw_.at(sec).at(key);
    std::vector<double> out;
    std::istringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      out.push_back(to_num(item, sec + "." + key));
    }
    if (out.empty())
      throw ConfigError("list " + sec + "." + key + " must not be empty");
    return out;
  }
  std::vector<std::pair<int, int>> mode_list(const std::string& sec, const std::string& key,
                                             std::vector<std::pair<int, int>> dflt) const {
    if (!has(sec, key)) return dflt;
    const std::string& v = raw_.at(sec).at(key);
    std::vector<std::pair<int, int>> out;
    std::istringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      const auto colon = item.find(':');
      if (colon == std::string::npos)
        throw ConfigError("mode entries use p:q form in " + sec + "." + key);
      char* end = nullptr;
      const long p = std::strtol(item.substr(0, colon).c_str(), &end, 10);
      const long q = std::strtol(item.substr(colon + 1).c_str(), &end, 10);
      if (p < 1 || q < 1) throw ConfigError("mode indices must be positive in " + sec + "." + key);
      out.emplace_back(static_cast<int>(p), static_cast<int>(q));
    }
    if (out.empty()) throw ConfigError("list " + sec + "." + key + " must not be empty");
    return out;
  }

 private:
  static double to_num(const std::string& v, const std::string& what) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
      throw ConfigError("expected a number for " + what + ", got '" + v + "'");
    return x;
  }
  Raw raw_;
};

void check(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

}  // namespace

ResolvedConfig parse_config_string(const std::string& text) {
  const Resolver r(parse_raw(text));
  ResolvedConfig cfg;

  const long nx = r.integer("grid", "nx", 81), ny = r.integer("grid", "ny", 81);
  const double dx = r.num("grid", "dx", 25000.0), dy = r.num("grid", "dy", 25000.0);
  check(nx >= 3 && ny >= 3, "grid must be at least 3x3");
  check(dx > 0.0 && dy > 0.0, "grid spacing must be positive");
  cfg.twin.grid = Grid(static_cast<int>(nx), static_cast<int>(ny), dx, dy);

  const std::string kind = r.str("model", "kind", "simplified");
  if (kind == "simplified")
    cfg.twin.model = TwinModel::simplified;
  else if (kind == "nonlinear")
    cfg.twin.model = TwinModel::nonlinear;
  else
    throw ConfigError("model.kind must be simplified or nonlinear, got '" + kind + "'");

  cfg.twin.dt = r.num("model", "dt", 1800.0);
  check(cfg.twin.dt > 0.0, "model.dt must be positive");
  cfg.twin.n_steps = static_cast<int>(r.integer("model", "n_steps", 5760));
  check(cfg.twin.n_steps >= 1, "model.n_steps must be at least 1");

  ModelParams& p = cfg.twin.params;
  p.g_reduced = r.num("model", "g_reduced", p.g_reduced);
  p.h_bar = r.num("model", "h_bar", p.h_bar);
  p.f0 = r.num("model", "f0", p.f0);
  p.beta = r.num("model", "beta", p.beta);
  p.friction = r.num("model", "friction", p.friction);
  p.viscosity = r.num("model", "viscosity", p.viscosity);
  p.alpha_a = r.num("model", "alpha_a", p.alpha_a);
  p.alpha_tau = r.num("model", "alpha_tau", p.alpha_tau);
  p.tau_max = r.num("model", "tau_max", p.tau_max);
  p.rho = r.num("model", "rho", p.rho);
  p.coriolis_length = r.num("model", "coriolis_length", p.coriolis_length);
  check(p.g_reduced > 0.0 && p.h_bar > 0.0 && p.rho > 0.0,
        "g_reduced, h_bar and rho must be positive");

  const std::string wind = r.str("model", "wind", "double_gyre");
  if (wind == "zero")
    p.wind = WindProfile::zero;
  else if (wind == "single_gyre")
    p.wind = WindProfile::single_gyre;
  else if (wind == "double_gyre")
    p.wind = WindProfile::double_gyre;
  else
    throw ConfigError("model.wind must be zero, single_gyre or double_gyre, got '" + wind + "'");

  cfg.twin.force_cfl = r.boolean("model", "force_cfl", false);
  cfg.twin.snapshot_every = static_cast<int>(r.integer("model", "snapshot_every", 0));
  check(cfg.twin.snapshot_every >= 0, "model.snapshot_every must be nonnegative");

  const std::string init = r.str("model", "init", "low_mode");
  if (init == "low_mode") {
    LowModePerturbation lm;
    lm.amplitude_h = r.num("model", "amplitude_h", lm.amplitude_h);
    lm.amplitude_v = r.num("model", "amplitude_v", lm.amplitude_v);
    check(lm.amplitude_h >= 0.0 && lm.amplitude_v >= 0.0, "amplitudes must be nonnegative");
    lm.modes = r.mode_list("model", "modes", lm.modes);
    cfg.twin.truth_init = lm;
  } else if (init == "spinup") {
    Spinup sp;
    sp.steps = static_cast<int>(r.integer("model", "spinup_steps", sp.steps));
    check(sp.steps >= 0, "model.spinup_steps must be nonnegative");
    cfg.twin.truth_init = sp;
  } else if (init == "snapshot") {
    FromSnapshot fs;
    fs.prefix = r.str("model", "snapshot_prefix", "");
    check(!fs.prefix.empty(), "model.snapshot_prefix is required for init = snapshot");
    cfg.twin.truth_init = fs;
  } else {
    throw ConfigError("model.init must be low_mode, spinup or snapshot, got '" + init + "'");
  }

  const double alpha = r.num("observer", "alpha", 1.0);
  const double beta_h = r.num("observer", "beta_h", 5e-7);
  const double beta_v = r.num("observer", "beta_v", 0.1 * beta_h);
  const long trunc = r.integer("observer", "truncation_radius", 10);
  check(alpha > 0.0, "observer.alpha must be positive");
  check(beta_h >= 0.0 && beta_v >= 0.0, "observer gains must be nonnegative");
  check(trunc >= 0, "observer.truncation_radius must be nonnegative");
  const std::string kernel = r.str("observer", "kernel", "gaussian");
  if (kernel == "gaussian") {
    cfg.twin.observer.kernel_h = KernelSpec{GaussianSpec{alpha, beta_h}, static_cast<int>(trunc)};
    cfg.twin.observer.kernel_v = KernelSpec{GaussianSpec{alpha, beta_v}, static_cast<int>(trunc)};
  } else if (kernel == "dirac") {
    cfg.twin.observer.kernel_h = KernelSpec{DiracSpec{beta_h}, 0};
    cfg.twin.observer.kernel_v = KernelSpec{DiracSpec{beta_v}, 0};
  } else {
    throw ConfigError("observer.kernel must be gaussian or dirac, got '" + kernel + "'");
  }
  const std::string omodel = r.str("observer", "model", kind);
  if (omodel == "simplified")
    cfg.twin.observer.model = ObserverModel::simplified;
  else if (omodel == "nonlinear")
    cfg.twin.observer.model = ObserverModel::nonlinear;
  else
    throw ConfigError("observer.model must be simplified or nonlinear, got '" + omodel + "'");

  cfg.twin.noise_fraction = r.num("noise", "fraction", 0.0);
  check(cfg.twin.noise_fraction >= 0.0, "noise.fraction must be nonnegative");
  cfg.twin.rng_seed = r.u64("noise", "seed", 1);

  cfg.sweep.alphas = r.numbers("sweep", "alphas", cfg.sweep.alphas);
  cfg.sweep.beta_hs = r.numbers("sweep", "beta_hs", cfg.sweep.beta_hs);
  cfg.sweep.noises = r.numbers("sweep", "noises", cfg.sweep.noises);
  if (r.has("sweep", "dts")) cfg.sweep.dts = r.numbers("sweep", "dts", {});
  for (double a : cfg.sweep.alphas) check(a > 0.0, "sweep.alphas must be positive");
  for (double b : cfg.sweep.beta_hs) check(b >= 0.0, "sweep.beta_hs must be nonnegative");
  for (double n : cfg.sweep.noises) check(n >= 0.0, "sweep.noises must be nonnegative");
  for (double d : cfg.sweep.dts) check(d > 0.0, "sweep.dts must be positive");

  return cfg;
}

ResolvedConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_string(buf.str());
}

namespace {

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += g17(v[i]);
  }
  return s;
}

}  // namespace

std::string canonical_config(const ResolvedConfig& cfg) {
  const TwinConfig& t = cfg.twin;
  const ModelParams& p = t.params;
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("grid.nx", std::to_string(t.grid.nx));
  kv.emplace_back("grid.ny", std::to_string(t.grid.ny));
  kv.emplace_back("grid.dx", g17(t.grid.dx));
  kv.emplace_back("grid.dy", g17(t.grid.dy));
  kv.emplace_back("model.kind", t.model == TwinModel::nonlinear ? "nonlinear" : "simplified");
  kv.emplace_back("model.dt", g17(t.dt));
  kv.emplace_back("model.n_steps", std::to_string(t.n_steps));
  kv.emplace_back("model.g_reduced", g17(p.g_reduced));
  kv.emplace_back("model.h_bar", g17(p.h_bar));
  kv.emplace_back("model.f0", g17(p.f0));
  kv.emplace_back("model.beta", g17(p.beta));
  kv.emplace_back("model.friction", g17(p.friction));
  kv.emplace_back("model.viscosity", g17(p.viscosity));
  kv.emplace_back("model.alpha_a", g17(p.alpha_a));
  kv.emplace_back("model.alpha_tau", g17(p.alpha_tau));
  kv.emplace_back("model.tau_max", g17(p.tau_max));
  kv.emplace_back("model.rho", g17(p.rho));
  kv.emplace_back("model.coriolis_length", g17(p.coriolis_length));
  kv.emplace_back("model.wind", p.wind == WindProfile::zero          ? "zero"
                                : p.wind == WindProfile::single_gyre ? "single_gyre"
                                                                     : "double_gyre");
  kv.emplace_back("model.force_cfl", t.force_cfl ? "true" : "false");
  kv.emplace_back("model.snapshot_every", std::to_string(t.snapshot_every));
  if (const auto* lm = std::get_if<LowModePerturbation>(&t.truth_init)) {
    kv.emplace_back("model.init", "low_mode");
    kv.emplace_back("model.amplitude_h", g17(lm->amplitude_h));
    kv.emplace_back("model.amplitude_v", g17(lm->amplitude_v));
    std::string m;
    for (size_t i = 0; i < lm->modes.size(); ++i) {
      if (i) m += ',';
      m += std::to_string(lm->modes[i].first) + ":" + std::to_string(lm->modes[i].second);
    }
    kv.emplace_back("model.modes", m);
  } else if (const auto* sp = std::get_if<Spinup>(&t.truth_init)) {
    kv.emplace_back("model.init", "spinup");
    kv.emplace_back("model.spinup_steps", std::to_string(sp->steps));
  } else {
    kv.emplace_back("model.init", "snapshot");
    kv.emplace_back("model.snapshot_prefix", std::get<FromSnapshot>(t.truth_init).prefix);
  }

  const auto kernel_kv = [&kv](const std::string& which, const KernelSpec& ks) {
    if (const auto* gs = std::get_if<GaussianSpec>(&ks.shape)) {
      kv.emplace_back("observer." + which + ".kind", "gaussian");
      kv.emplace_back("observer." + which + ".alpha", g17(gs->alpha));
      kv.emplace_back("observer." + which + ".beta", g17(gs->beta));
    } else {
      kv.emplace_back("observer." + which + ".kind", "dirac");
      kv.emplace_back("observer." + which + ".gain", g17(std::get<DiracSpec>(ks.shape).gain));
    }
    kv.emplace_back("observer." + which + ".truncation_radius",
                    std::to_string(ks.truncation_radius));
  };
  kernel_kv("kernel_h", t.observer.kernel_h);
  kernel_kv("kernel_v", t.observer.kernel_v);
  kv.emplace_back("observer.model",
                  t.observer.model == ObserverModel::nonlinear ? "nonlinear" : "simplified");

  kv.emplace_back("noise.fraction", g17(t.noise_fraction));
  kv.emplace_back("noise.seed", std::to_string(t.rng_seed));

  kv.emplace_back("sweep.alphas", join(cfg.sweep.alphas));
  kv.emplace_back("sweep.beta_hs", join(cfg.sweep.beta_hs));
  kv.emplace_back("sweep.noises", join(cfg.sweep.noises));
  kv.emplace_back("sweep.dts", join(cfg.sweep.dts));

  std::sort(kv.begin(), kv.end());
  std::string out;
  for (const auto& [k, v] : kv) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

std::string config_hash(const ResolvedConfig& cfg) {
  const std::string text = canonical_config(cfg);
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<SweepPoint> sweep_points(const ResolvedConfig& cfg) {
  std::vector<SweepPoint> pts;
  for (double a : cfg.sweep.alphas)
    for (double b : cfg.sweep.beta_hs)
      for (double n : cfg.sweep.noises) {
        if (cfg.sweep.dts.empty()) {
          pts.push_back(SweepPoint{a, b, n, std::nullopt});
        } else {
          for (double d : cfg.sweep.dts) pts.push_back(SweepPoint{a, b, n, d});
        }
      }
  return pts;
}

}  // namespace swnudge
