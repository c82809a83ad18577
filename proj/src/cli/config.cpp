#include <algorithm>
#include <cmath>

#include "catalog.hpp"
#include "sigmalab/cli.hpp"

namespace sigmalab::cli {

json default_config(bool heavy) {
  json cfg = {
      {"suite", "sigma-verify"},
      {"checks", json::array()},
      {"grid", {{"dt", heavy ? 1e-5 : 1e-4}, {"n_steps", heavy ? 100000 : 10000}}},
      {"ensemble", {{"n_paths", heavy ? 10000 : 2000}, {"master_seed", 20240601}}},
      {"process", {{"family", "reflected"}, {"params", {{"z", 1.0}, {"u_c", 0.5}, {"delta", 0.0}}}}},
      {"phi", {{"kind", "constant"}, {"c", 1.0}, {"u", {0.5, 1.0, 2.0}}, {"max_horizon", 50.0}}},
      {"nested", {{"dt", 1e-4}, {"n_outer", 200}, {"n_inner", 1000}, {"t_star", 0.5}}},
      {"refinement", {{"dt", {1e-3, 2.5e-4, 6.25e-5}}, {"n_paths", 1000}}},
      {"tolerances",
       {{"carried_ratio", 0.05},
        {"martingale_score", 4.0},
        {"exceedance_allowance", 0.02},
        {"boundary_fraction", 0.99},
        {"ks", 0.02},
        {"local_time_relative", 0.1},
        {"local_time_mean", 0.03},
        {"eq3_finest", 0.05},
        {"representation_median", 1.5},
        {"balayage_oscillation", 1e-10}}},
      {"output_dir", "sigmalab-out"},
  };
  return cfg;
}

namespace {

bool compatible(const json& a, const json& b) {
  if (a.is_number() && b.is_number())
    return !(a.is_number_integer() || a.is_number_unsigned()) || b.is_number_integer() || b.is_number_unsigned();
  return a.type() == b.type();
}

double num(const json& cfg, const char* a, const char* b) { return cfg.at(a).at(b).get<double>(); }

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok)
    throw ConfigError(key, what);
}

} // namespace

void merge_config(json& base, const json& overlay, const std::string& prefix) {
  if (!overlay.is_object())
    throw ConfigError(prefix.empty() ? "<root>" : prefix, "expected an object");
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!base.contains(it.key()))
      throw ConfigError(key, "unknown key");
    json& slot = base[it.key()];
    if (slot.is_object()) {
      merge_config(slot, it.value(), key);
      continue;
    }
    if (!compatible(slot, it.value()))
      throw ConfigError(key, std::string("expected ") + slot.type_name() + ", got " + it.value().type_name());
    slot = it.value();
  }
}

void apply_override(json& cfg, const std::string& dotted, const std::string& value) {
  const json* leaf = &cfg;
  for (std::size_t start = 0;;) {
    const std::size_t dot = dotted.find('.', start);
    const std::string part = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty())
      throw ConfigError(dotted, "malformed dotted key");
    if (!leaf->is_object() || !leaf->contains(part))
      throw ConfigError(dotted, "unknown key");
    leaf = &leaf->at(part);
    if (dot == std::string::npos)
      break;
    start = dot + 1;
  }
  if (leaf->is_object())
    throw ConfigError(dotted, "not a scalar leaf");

  json overlay;
  try {
    overlay = json::parse(value);
  } catch (const json::parse_error&) {
    overlay = value;
  }
  // A bare comma-separated list fills an array slot.
  if (leaf->is_array() && overlay.is_string()) {
    json items = json::array();
    std::size_t from = 0;
    while (from <= value.size()) {
      const std::size_t comma = std::min(value.find(',', from), value.size());
      if (comma > from)
        items.push_back(value.substr(from, comma - from));
      from = comma + 1;
    }
    overlay = std::move(items);
  }
  for (std::size_t end = dotted.size();;) {
    const std::size_t dot = dotted.rfind('.', end - 1);
    const std::size_t from = dot == std::string::npos ? 0 : dot + 1;
    overlay = json{{dotted.substr(from, end - from), overlay}};
    if (dot == std::string::npos)
      break;
    end = dot;
  }
  merge_config(cfg, overlay);
}

void validate_config(const json& cfg) {
  const std::string suite = cfg.at("suite").get<std::string>();
  require(std::find(std::begin(kSuites), std::end(kSuites), suite) != std::end(kSuites), "suite",
          "unknown suite '" + suite + "'");
  for (const auto& name : cfg.at("checks")) {
    require(name.is_string(), "checks", "entries must be check names");
    const bool known = std::any_of(std::begin(kCatalog), std::end(kCatalog), [&](const CatalogEntry& e) {
      return (suite == "all" || e.suite == suite) && e.name == name.get<std::string>();
    });
    require(known, "checks", "no check '" + name.get<std::string>() + "' in suite '" + suite + "'");
  }
  require(num(cfg, "grid", "dt") > 0.0, "grid.dt", "must be > 0");
  require(cfg.at("grid").at("n_steps").get<long long>() >= 1, "grid.n_steps", "must be >= 1");
  require(cfg.at("ensemble").at("n_paths").get<long long>() >= 1, "ensemble.n_paths", "must be >= 1");
  require(cfg.at("ensemble").at("master_seed").get<long long>() >= 0, "ensemble.master_seed", "must be >= 0");
  const std::string family = cfg.at("process").at("family").get<std::string>();
  require(family == "brownian" || family == "reflected" || family == "drawdown" || family == "theorem31",
          "process.family", "unknown family '" + family + "'");
  const json& params = cfg.at("process").at("params");
  require(params.at("z").get<double>() >= 0.0, "process.params.z", "must be >= 0");
  require(params.at("delta").get<double>() >= 0.0, "process.params.delta", "must be >= 0");
  const std::string kind = cfg.at("phi").at("kind").get<std::string>();
  require(kind == "constant" || kind == "exp", "phi.kind", "expected 'constant' or 'exp'");
  require(num(cfg, "phi", "c") > 0.0, "phi.c", "must be > 0");
  require(num(cfg, "phi", "max_horizon") > 0.0, "phi.max_horizon", "must be > 0");
  const json& us = cfg.at("phi").at("u");
  require(!us.empty(), "phi.u", "must be a non-empty array");
  for (const auto& u : us)
    require(u.is_number() && u.get<double>() > 0.0, "phi.u", "entries must be numbers > 0");
  const json& nested = cfg.at("nested");
  require(nested.at("dt").get<double>() > 0.0, "nested.dt", "must be > 0");
  require(nested.at("n_outer").get<long long>() >= 1, "nested.n_outer", "must be >= 1");
  require(nested.at("n_inner").get<long long>() >= 2, "nested.n_inner", "must be >= 2");
  const double ts = nested.at("t_star").get<double>();
  require(ts > 0.0 && ts < 1.0, "nested.t_star", "must lie in (0, 1)");
  const json& ref = cfg.at("refinement");
  require(ref.at("dt").size() >= 2, "refinement.dt", "need at least two grids");
  for (const auto& d : ref.at("dt"))
    require(d.is_number() && d.get<double>() > 0.0, "refinement.dt", "entries must be numbers > 0");
  require(ref.at("n_paths").get<long long>() >= 1, "refinement.n_paths", "must be >= 1");
  for (auto it = cfg.at("tolerances").begin(); it != cfg.at("tolerances").end(); ++it)
    require(it.value().get<double>() >= 0.0, "tolerances." + it.key(), "must be >= 0");
}

} // namespace sigmalab::cli
