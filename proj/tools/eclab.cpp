// Scenario runner: eclab list | eclab run <scenario> [options] | eclab config <scenario>

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eclab/errors.hpp"
#include "eclab/harness.hpp"

namespace h = eclab::harness;

namespace {

// Leftover "--key value" or "--key=value" pairs become params.key overrides;
// dotted keys address other sections.
void apply_extras(const std::vector<std::string>& extras, h::Config& over) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& a = extras[i];
    if (a.rfind("--", 0) != 0 || a.size() < 3) throw h::UsageError("unexpected argument " + a);
    std::string key = a.substr(2), value;
    if (auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= extras.size()) throw h::UsageError("missing value for " + a);
      value = extras[++i];
    }
    over.set(key.find('.') == std::string::npos ? "params." + key : key, value);
  }
}

void print_list() {
  for (const auto& s : h::registry()) std::cout << s.name << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eclab scenario runner"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "list registered scenarios");

  auto* run = app.add_subcommand("run", "run one scenario");
  std::string scenario, config_path, out_dir = "eclab-out";
  std::vector<std::string> sets;
  long seed = -1, threads = -1;
  bool run_list = false;
  run->add_option("scenario", scenario, "scenario name");
  run->add_option("--config", config_path, "config file (key = value with sections)");
  run->add_option("--out", out_dir, "artifact directory")->capture_default_str();
  run->add_option("--seed", seed, "override run.seed");
  run->add_option("--threads", threads, "override run.threads");
  run->add_option("--set", sets, "override section.key=value (repeatable)");
  run->add_flag("--list", run_list, "list registered scenarios");
  run->allow_extras();

  auto* cfg = app.add_subcommand("config", "print the default config of a scenario");
  std::string cfg_name;
  cfg->add_option("scenario", cfg_name, "scenario name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*list) {
      print_list();
      return 0;
    }
    if (*cfg) {
      std::cout << h::find_scenario(cfg_name).defaults;
      return 0;
    }
    if (run_list) {
      print_list();
      return 0;
    }
    if (scenario.empty()) throw h::UsageError("run needs a scenario name (see eclab list)");
    h::find_scenario(scenario);

    h::Config over;
    if (!config_path.empty()) over = h::Config::load(config_path);
    for (const auto& s : sets) {
      auto eq = s.find('=');
      if (eq == std::string::npos) throw h::UsageError("--set expects section.key=value");
      over.set(s.substr(0, eq), s.substr(eq + 1));
    }
    apply_extras(run->remaining(), over);
    if (seed >= 0) over.set("run.seed", std::to_string(seed));
    if (threads >= 0) over.set("run.threads", std::to_string(threads));

    auto result = h::run_scenario(scenario, over);
    std::cout << result.summary_text();
    for (const auto& p : h::write_artifacts(result, out_dir)) std::cout << "wrote " << p << "\n";
    if (!result.passed()) {
      for (const auto& a : result.assertions)
        if (!a.pass) std::cerr << "failed assertion: " << a.name << "\n";
      return 1;
    }
    return 0;
  } catch (const h::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const eclab::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
