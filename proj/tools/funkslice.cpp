#include "funkslice/commands.hpp"
#include "funkslice/errors.hpp"

#include <CLI11.hpp>
#include <spdlog/cfg/helpers.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <optional>

using namespace funkslice;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Unsupported:
      return 2;
    case ErrorKind::Io:
      return 4;
    default:
      return 3;  // everything else is a numerical failure of some sort
  }
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("funkslice");
  logger->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("FUNKSLICE_LOG")) {
    // plain level name ("debug") or spdlog's key=value syntax
    spdlog::cfg::helpers::load_levels(env);
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"funkslice: shifted Funk and parallel slice transforms on spheres"};
  app.require_subcommand(1, 1);
  std::string config_path;
  int threads = 0;
  std::optional<std::uint64_t> seed;

  const char* names[] = {"phantom", "forward", "invert", "verify", "plot"};
  const char* help[] = {"sample the configured phantom", "sweep the configured transform",
                        "reconstruct from the stored profile", "run the identity suite",
                        "render heatmaps and curves from existing outputs"};
  for (int i = 0; i < 5; ++i) {
    auto* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--config", config_path, "experiment JSON")->required();
    sub->add_option("--threads", threads, "worker threads (default: from config)")->check(CLI::Range(1, 1024));
    sub->add_option("--seed", seed, "override every seed of the config");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    ExperimentConfig config = load_config(config_path, seed);
    if (threads > 0) config.threads = threads;
    spdlog::debug("{} with config {}", cmd, describe_config(config).dump());
    if (cmd == "phantom") {
      cmd_phantom(config);
    } else if (cmd == "forward") {
      const SectionProfile p = cmd_forward(config);
      if (!p.flagged.empty()) return 3;
    } else if (cmd == "invert") {
      cmd_invert(config);
    } else if (cmd == "verify") {
      const VerificationReport r = cmd_verify(config);
      if (!r.all_passed()) {
        spdlog::error("verify: some checks failed");
        return 3;
      }
    } else {
      cmd_plot(config);
    }
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    spdlog::error("unexpected: {}", e.what());
    return 3;
  }
  return 0;
}
