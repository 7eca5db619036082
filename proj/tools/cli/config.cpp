#include "cli/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "edgewise/errors.hpp"
#include "edgewise/gabor.hpp"
#include "edgewise/io.hpp"
#include "edgewise/tfcore.hpp"

namespace edgewise::cli {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

void only_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key \"" + it.key() + "\"");
}

template <class T>
T get(const json& j, const std::string& key, const std::string& where, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

double positive(double v, const std::string& what) {
  if (!(v > 0) || !std::isfinite(v)) throw ConfigError(what + " must be positive");
  return v;
}

// {"from", "to", "count"} or {"values"}
std::vector<double> range(const json& j, const std::string& where, const std::set<std::string>& extra = {}) {
  std::set<std::string> allowed = {"from", "to", "count", "values"};
  allowed.insert(extra.begin(), extra.end());
  only_keys(j, where, allowed);
  if (j.contains("values")) {
    if (j.contains("from") || j.contains("to") || j.contains("count"))
      throw ConfigError(where + ": give either values or from/to/count");
    auto v = get<std::vector<double>>(j, "values", where, {});
    if (v.empty()) throw ConfigError(where + ".values: empty");
    return v;
  }
  if (!j.contains("from") || !j.contains("to") || !j.contains("count"))
    throw ConfigError(where + ": needs from, to and count");
  double a = get<double>(j, "from", where, 0), b = get<double>(j, "to", where, 0);
  int n = get<int>(j, "count", where, 0);
  if (n < 1) throw ConfigError(where + ".count must be at least 1");
  if (n > 1 && !(b > a)) throw ConfigError(where + ": to must exceed from");
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace

FourierSymbol resolve_symbol(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("symbol: ") + e.what());
  }
  if (j.is_object() && j.value("builtin", std::string()) == "gaussian_lattice") {
    only_keys(j, "symbol", {"builtin", "K"});
    int K = get<int>(j, "K", "symbol", 4);
    if (K < 1 || K > 12) throw ConfigError("symbol.K must lie in [1, 12]");
    return gaussian_lattice_symbol(K);
  }
  return FourierSymbol::from_json(text);
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  const std::set<std::string> common = {"version", "kind", "seed", "threads"};
  const std::set<std::string> alpha_keys = {"window", "points", "alpha", "section", "alpha0", "fit_from", "zak_oracle"};
  const std::set<std::string> flux_keys = {"symbol", "flux", "bloch_m"};
  const std::set<std::string> delta_keys = {"symbol", "delta", "bloch_m"};
  if (!j.is_object()) throw ConfigError("config: expected an object");
  RunConfig c;
  if (!j.contains("version")) throw ConfigError("config: missing \"version\"");
  c.version = get<int>(j, "version", "config", 0);
  if (c.version != kConfigVersion)
    throw ConfigError("config: version " + std::to_string(c.version) + " is not supported (expected " +
                      std::to_string(kConfigVersion) + ")");
  c.kind = get<std::string>(j, "kind", "config", "");
  std::set<std::string> allowed = common;
  if (c.kind == "alpha") allowed.insert(alpha_keys.begin(), alpha_keys.end());
  else if (c.kind == "flux") allowed.insert(flux_keys.begin(), flux_keys.end());
  else if (c.kind == "delta") allowed.insert(delta_keys.begin(), delta_keys.end());
  else throw ConfigError("config.kind must be alpha, flux or delta");
  only_keys(j, "config", allowed);
  c.seed = get<unsigned long long>(j, "seed", "config", c.seed);
  c.threads = get<int>(j, "threads", "config", c.threads);
  if (c.threads < 1) throw ConfigError("config.threads must be at least 1");

  if (c.kind == "alpha") {
    c.window = get<std::string>(j, "window", "config", c.window);
    parse_window(c.window);  // throws on an unknown window
    if (j.contains("points")) {
      const json& p = j.at("points");
      only_keys(p, "points", {"kind", "jitter", "path"});
      c.points = get<std::string>(p, "kind", "points", c.points);
      if (c.points == "jittered") {
        c.jitter = get<double>(p, "jitter", "points", c.jitter);
        if (!(c.jitter >= 0 && c.jitter < 0.5)) throw ConfigError("points.jitter must lie in [0, 0.5)");
      } else if (c.points == "csv") {
        c.points_path = get<std::string>(p, "path", "points", "");
        if (c.points_path.empty()) throw ConfigError("points.path is required for csv points");
      } else if (c.points != "lattice") {
        throw ConfigError("points.kind must be lattice, jittered or csv");
      }
      if (c.points != "jittered" && p.contains("jitter")) throw ConfigError("points.jitter needs kind jittered");
      if (c.points != "csv" && p.contains("path")) throw ConfigError("points.path needs kind csv");
    }
    if (!j.contains("alpha")) throw ConfigError("config: alpha sweep needs \"alpha\"");
    c.alphas = range(j.at("alpha"), "alpha");
    for (double a : c.alphas) positive(a, "alpha");
    if (j.contains("section")) {
      const json& s = j.at("section");
      only_keys(s, "section", {"T", "step", "cutoff"});
      c.T = positive(get<double>(s, "T", "section", c.T), "section.T");
      c.section_step = positive(get<double>(s, "step", "section", c.section_step), "section.step");
      c.cutoff = positive(get<double>(s, "cutoff", "section", c.cutoff), "section.cutoff");
    }
    c.alpha0 = positive(get<double>(j, "alpha0", "config", c.alpha0), "alpha0");
    c.fit_from = get<double>(j, "fit_from", "config", c.fit_from);
    if (j.contains("zak_oracle")) {
      const json& z = j.at("zak_oracle");
      if (z.is_boolean()) {
        c.zak_oracle = z.get<bool>();
      } else {
        only_keys(z, "zak_oracle", {"qmax"});
        c.zak_oracle = true;
        c.zak_qmax = get<long>(z, "qmax", "zak_oracle", c.zak_qmax);
        if (c.zak_qmax < 1) throw ConfigError("zak_oracle.qmax must be positive");
      }
      if (c.zak_oracle && c.points != "lattice") throw ConfigError("zak_oracle needs lattice points");
    }
  } else {
    if (j.contains("symbol")) {
      c.symbol = j.at("symbol").dump();
      resolve_symbol(c.symbol);  // validates
    }
    c.bloch_m = get<int>(j, "bloch_m", "config", c.bloch_m);
    if (c.bloch_m < 32) throw ConfigError("bloch_m must be at least 32");
    if (c.kind == "flux") {
      if (!j.contains("flux")) throw ConfigError("config: flux sweep needs \"flux\"");
      const json& f = j.at("flux");
      only_keys(f, "flux", {"farey_order", "from", "to", "values"});
      if (f.contains("values")) {
        if (f.contains("farey_order")) throw ConfigError("flux: give either values or farey_order");
        for (const auto& v : f.at("values")) {
          if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
            throw ConfigError("flux.values: entries are [p, q] integer pairs");
          try {
            c.fluxes.emplace_back(v[0].get<long>(), v[1].get<long>());
          } catch (const Error& e) {
            throw ConfigError(std::string("flux.values: ") + e.what());
          }
        }
      } else {
        int order = get<int>(f, "farey_order", "flux", 0);
        if (order < 1 || order > 200) throw ConfigError("flux.farey_order must lie in [1, 200]");
        double lo = get<double>(f, "from", "flux", 0), hi = get<double>(f, "to", "flux", 1);
        for (const auto& r : farey(order, lo, hi))
          if (r.p > 0) c.fluxes.push_back(r);
      }
      if (c.fluxes.empty()) throw ConfigError("flux: no fluxes selected");
    } else {
      if (!j.contains("delta")) throw ConfigError("config: delta sweep needs \"delta\"");
      const json& d = j.at("delta");
      c.deltas = range(d, "delta", {"qmax"});
      c.qmax = get<long>(d, "qmax", "delta", c.qmax);
      if (c.qmax < 1 || c.qmax > 200) throw ConfigError("delta.qmax must lie in [1, 200]");
      for (double v : c.deltas) {
        if (!(v > -1)) throw ConfigError("delta values must exceed -1");
        c.fluxes.push_back(FluxRational::approximate(1 + v, c.qmax));
      }
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string RunConfig::canonical() const {
  ojson j;
  j["version"] = version;
  j["kind"] = kind;
  j["seed"] = seed;
  if (kind == "alpha") {
    j["window"] = window;
    j["points"] = {{"kind", points}, {"jitter", jitter}, {"path", points_path}};
    j["alpha"] = alphas;
    j["section"] = {{"T", T}, {"step", section_step}, {"cutoff", cutoff}};
    j["alpha0"] = alpha0;
    j["fit_from"] = fit_from;
    j["zak_oracle"] = zak_oracle;
    j["zak_qmax"] = zak_qmax;
  } else {
    j["symbol"] = json::parse(symbol);
    ojson fl = ojson::array();
    for (const auto& f : fluxes) fl.push_back({f.p, f.q});
    j["fluxes"] = fl;
    if (kind == "delta") {
      j["deltas"] = deltas;
      j["qmax"] = qmax;
    }
    j["bloch_m"] = bloch_m;
  }
  // threads do not change results and stay out of the hash
  return j.dump();
}

std::string RunConfig::hash() const {
  std::ostringstream os;
  os << std::hex << fnv1a(canonical());
  return os.str();
}

}  // namespace edgewise::cli
