#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>
#include <map>
#include <tuple>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using namespace nebed;
using namespace nebed::cli;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("nebed");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S.%e] [%l] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("NEBED_LOG_LEVEL")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

// Every config key becomes a --key flag that overrides the config file.
struct Overrides {
  std::map<std::string, std::string> values;
  std::vector<std::tuple<std::string, const CLI::App*, CLI::Option*>> options;

  void attach(CLI::App* sub) {
    for (const auto& key : config_keys()) {
      options.emplace_back(key, sub, sub->add_option("--" + key, values[sub->get_name() + ":" + key],
                                                "overrides " + key)
                                    ->group("Config keys"));
    }
  }

  RunConfig resolve(const std::string& config_path, const CLI::App* sub) const {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    for (const auto& [key, owner, opt] : options) {
      if (owner != sub || opt->count() == 0) continue;
      set_config_value(cfg, key, values.at(sub->get_name() + ":" + key));
    }
    cfg.validate();
    return cfg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nebed: node embedding training with a pipelined multi-worker runtime"};
  app.require_subcommand(1);
  std::string config_path;
  Overrides overrides;

  auto* walk = app.add_subcommand("walk", "generate walk corpora (episode sample files)");
  auto* train = app.add_subcommand("train", "train embeddings on existing walk corpora");
  auto* eval = app.add_subcommand("eval", "link-prediction AUC of checkpoints");
  auto* estimate = app.add_subcommand("estimate", "memory and timeline cost model");
  auto* run = app.add_subcommand("run", "walk, train and evaluate end to end");

  std::optional<std::size_t> walk_epoch;
  std::string checkpoint;
  bool machine_readable = false;
  walk->add_option("--epoch", walk_epoch, "generate a single corpus epoch");
  eval->add_option("--checkpoint", checkpoint, "checkpoint directory (default: every epoch)");
  estimate->add_flag("--kv", machine_readable, "print key=value lines");
  for (auto* sub : {walk, train, eval, estimate, run}) {
    sub->add_option("-c,--config", config_path, "key=value config file");
    overrides.attach(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << "\n";
    return 2;
  }

  setup_logging();
  try {
    auto* sub = app.get_subcommands().front();
    const auto cfg = overrides.resolve(config_path, sub);
    if (sub == walk) {
      for (const auto& m : cmd_walk(cfg, walk_epoch)) std::cout << m.string() << "\n";
    } else if (sub == train) {
      std::cout << cmd_train(cfg).string() << "\n";
    } else if (sub == eval) {
      std::cout << cmd_eval(cfg, checkpoint.empty() ? std::nullopt
                                                    : std::optional<std::filesystem::path>(checkpoint));
    } else if (sub == estimate) {
      std::cout << cmd_estimate(cfg, machine_readable);
    } else if (sub == run) {
      std::cout << cmd_run(cfg);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind() << ": " << one_line(e.what()) << "\n";
    return e.kind() == "usage" ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}
