#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>

#include "sigmalab/cli.hpp"

namespace sigmalab::cli {

namespace {

struct Overrides {
  std::vector<std::pair<std::string, std::string>> items;
  std::vector<std::string> rest;
};

// Pulls `--a.b=v` and `--a.b v` for every config key out of argv before the
// option parser sees it.
Overrides split_overrides(int argc, char** argv) {
  const json probe = default_config();
  Overrides out;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a.rfind("--", 0) == 0) {
      std::string name = a.substr(2), value;
      const auto eq = name.find('=');
      const bool inline_value = eq != std::string::npos;
      if (inline_value) {
        value = name.substr(eq + 1);
        name.resize(eq);
      }
      if (probe.contains(name.substr(0, name.find('.')))) {
        if (!inline_value) {
          if (i + 1 >= argc)
            throw ConfigError(name, "missing value");
          value = argv[++i];
        }
        out.items.emplace_back(name, value);
        continue;
      }
    }
    out.rest.push_back(a);
  }
  return out;
}

json load_config_file(const std::string& file) {
  std::ifstream is(file);
  if (!is)
    throw ConfigError("--config", "cannot open '" + file + "'");
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("--config", std::string("malformed JSON: ") + e.what());
  }
}

int run(const Overrides& ov, const std::string& config_file, bool heavy, const std::string& out_dir,
        std::size_t workers) {
  json cfg = default_config(heavy);
  if (!config_file.empty())
    merge_config(cfg, load_config_file(config_file));
  for (const auto& [key, value] : ov.items)
    apply_override(cfg, key, value);
  if (!out_dir.empty())
    cfg["output_dir"] = out_dir;
  validate_config(cfg);

  const SuiteReport rep = run_suite(cfg, workers);
  const std::string dir = cfg["output_dir"].get<std::string>();
  write_outputs(rep, dir);
  for (const auto& c : rep.checks)
    std::cout << (c.informational ? "INFO" : (c.pass ? "PASS" : "FAIL")) << "  " << c.suite << '/' << c.name
              << "  (" << c.seconds << " s)\n";
  std::cout << "suite " << cfg["suite"].get<std::string>() << ": " << (rep.pass ? "PASS" : "FAIL") << "  hash "
            << rep.hash << "  report " << dir << "/report.json\n";
  return rep.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  try {
    const Overrides ov = split_overrides(argc, argv);

    CLI::App app{"sigmalab: Monte Carlo verification of excursion and local-time identities"};
    app.require_subcommand(1);

    std::string config_file, out_dir;
    bool heavy = false;
    std::size_t workers = 0;
    auto* run_cmd = app.add_subcommand("run", "Run a suite; config keys can be overridden with --key.path=value");
    run_cmd->add_option("--config", config_file, "JSON config file");
    run_cmd->add_flag("--heavy", heavy, "dt = 1e-5, 10^4 paths");
    run_cmd->add_option("--out", out_dir, "Output directory (overrides output_dir)");
    run_cmd->add_option("--workers", workers, "Worker threads, 0 = all cores");

    std::string suite;
    auto* describe_cmd = app.add_subcommand("describe", "List the checks of a suite and their tolerances");
    describe_cmd->add_option("suite", suite, "Suite name")->required();

    auto* version_cmd = app.add_subcommand("version", "Print the version");

    std::vector<std::string> rest(ov.rest.rbegin(), ov.rest.rend());
    try {
      app.parse(rest);
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0)
        return app.exit(e);
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    }

    if (!ov.items.empty() && !run_cmd->parsed()) {
      std::cerr << "error: config overrides only apply to 'run'\n";
      return 2;
    }
    if (version_cmd->parsed()) {
      std::cout << "sigmalab " << SIGMALAB_VERSION << '\n';
      return 0;
    }
    if (describe_cmd->parsed()) {
      std::cout << describe(suite);
      return 0;
    }
    return run(ov, config_file, heavy, out_dir, workers);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
}

} // namespace sigmalab::cli
