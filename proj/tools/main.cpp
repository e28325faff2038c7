// lookahead: run, sweep, verify, probe and export optimizer experiments.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lookahead/errors.hpp"
#include "lookahead/harness.hpp"
#include "lookahead/record_io.hpp"
#include "lookahead/verify.hpp"

namespace {

using namespace lookahead;

enum Exit { kOk = 0, kPropertyFailure = 1, kConfigError = 2, kDiverged = 3 };

void emit(const std::string& out, const std::string& content) {
  if (out.empty() || out == "-")
    std::cout << content;
  else
    write_file(out, content);
}

RunConfig load(const std::string& path, const std::vector<std::uint64_t>& seeds, bool single_seed) {
  RunConfig config = config_from_json(read_file(path));
  if (single_seed && seeds.size() > 1) throw ConfigError("--seeds takes one seed here; use sweep for several");
  if (single_seed && !seeds.empty()) config.noise_seed = seeds.front();
  return config;
}

std::string render(const RunRecord& record, const std::string& format) {
  return format == "json" ? to_json(record) : to_csv(record);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lookahead optimizer experiments"};
  app.require_subcommand(1);

  std::string config_path, out, format = "csv", suite = "all", input;
  std::vector<std::uint64_t> seeds;
  std::vector<std::int64_t> at_iters;
  std::vector<double> betas{0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
  std::vector<double> grid_gammas = kSweepGammas, grid_betas = kSweepBetas;
  int parallel = 1;

  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* run_cmd = app.add_subcommand("run", "Run one configuration and write its record");
  run_cmd->add_option("--config", config_path, "JSON run configuration")->required();
  run_cmd->add_option("--out", out, "Output path (default stdout)");
  run_cmd->add_option("--seeds", seeds, "Noise seed override")->delimiter(',');
  add_format(run_cmd);

  auto* sweep_cmd = app.add_subcommand("sweep", "Grid over gamma x beta_max for each seed");
  sweep_cmd->add_option("--config", config_path, "Base JSON configuration")->required();
  sweep_cmd->add_option("--out", out, "Summary CSV path (default stdout)");
  sweep_cmd->add_option("--seeds", seeds, "Noise seeds")->delimiter(',');
  sweep_cmd->add_option("--parallel", parallel, "Concurrent runs")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--gammas", grid_gammas, "EMA rates")->delimiter(',');
  sweep_cmd->add_option("--betas", grid_betas, "Peak lookahead steps")->delimiter(',');

  auto* verify_cmd = app.add_subcommand("verify", "Run property suites");
  verify_cmd->add_option("--suite", suite, "Suite name or 'all'");

  auto* probe_cmd = app.add_subcommand("probe", "Loss along the one-step and EMA directions");
  probe_cmd->add_option("--config", config_path, "JSON run configuration")->required();
  probe_cmd->add_option("--at", at_iters, "Iterations to probe")->delimiter(',')->required();
  probe_cmd->add_option("--betas", betas, "Lookahead steps")->delimiter(',');
  probe_cmd->add_option("--seeds", seeds, "Noise seed override")->delimiter(',');
  probe_cmd->add_option("--out", out, "Output path (default stdout)");

  auto* export_cmd = app.add_subcommand("export", "Convert a CSV record");
  export_cmd->add_option("input", input, "CSV record")->required();
  export_cmd->add_option("--out", out, "Output path (default stdout)");
  add_format(export_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run_cmd) {
      const RunRecord record = run(load(config_path, seeds, true));
      emit(out, render(record, format));
      if (record.status == RunStatus::Diverged) {
        std::cerr << "diverged at iteration " << *record.diverged_at << "\n";
        return kDiverged;
      }
      return kOk;
    }
    if (*sweep_cmd) {
      if (seeds.empty()) seeds.push_back(0);
      const auto points = sweep(load(config_path, {}, false), grid_gammas, grid_betas, seeds, parallel);
      emit(out, sweep_to_csv(points));
      return kOk;
    }
    if (*verify_cmd) {
      std::vector<Suite> suites;
      if (suite == "all") {
        suites = all_suites();
      } else if (const auto s = parse_suite(suite)) {
        suites.push_back(*s);
      } else {
        throw ConfigError("unknown suite '" + suite + "'");
      }
      bool ok = true;
      for (Suite s : suites) {
        const Report report = verify(s);
        std::cout << format_report(report);
        ok = ok && report.passed();
      }
      std::cout << (ok ? "all properties hold\n" : "some properties failed\n");
      return ok ? kOk : kPropertyFailure;
    }
    if (*probe_cmd) {
      emit(out, probe_to_csv(probe(load(config_path, seeds, true), at_iters, betas)));
      return kOk;
    }
    if (*export_cmd) {
      emit(out, render(parse_csv(read_file(input)), format));
      return kOk;
    }
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDiverged;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kOk;
}
