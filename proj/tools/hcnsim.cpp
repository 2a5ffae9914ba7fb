// hcnsim: validate, run and check split signaling/data network scenarios.
//
// Exit codes: 0 success, 1 conformance FAIL, 2 invalid input, 3 transport.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "hcn/conformance.hpp"
#include "hcn/scenario.hpp"
#include "hcn/simulator.hpp"
#include "hcn/split_run.hpp"
#include "hcn/summary.hpp"
#include "hcn/trace.hpp"
#include "hcn/udp.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kInvalidInput = 2;
constexpr int kTransportFailure = 3;

struct RunOptions {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string transport = "inproc";
  std::string trace_out;
  std::optional<std::int64_t> horizon;
  bool json_lines = false;
  std::uint16_t sbs_port = 5700;
  std::uint16_t dbs_port_base = 5701;
};

void add_run_flags(CLI::App* cmd, RunOptions& o, bool with_transport) {
  cmd->add_option("--scenario", o.scenario, "scenario file (.hcn-scn)")->required();
  cmd->add_option("--seed", o.seed, "override the scenario seed");
  if (with_transport)
    cmd->add_option("--transport", o.transport, "inproc or udp")->check(CLI::IsMember({"inproc", "udp"}));
  cmd->add_option("--trace-out", o.trace_out, "trace file, default <scenario>.hcn-trace in the working directory");
  cmd->add_option("--horizon", o.horizon, "stop after this virtual time (us)");
  cmd->add_flag("--json-lines", o.json_lines, "print trace records and summary as JSON lines");
  cmd->add_option("--sbs-port", o.sbs_port, "UDP port of the SBS process");
  cmd->add_option("--dbs-port-base", o.dbs_port_base, "UDP port of the first DBS process");
}

std::optional<hcn::Scenario> load_valid(const std::string& path) {
  hcn::Scenario s;
  try {
    s = hcn::load_scenario(path);
  } catch (const hcn::ScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return std::nullopt;
  }
  auto problems = hcn::validate_scenario(s);
  if (problems.empty()) return s;
  std::cerr << "error: invalid scenario " << path << '\n';
  for (const auto& p : problems) std::cerr << "  " << p << '\n';
  return std::nullopt;
}

int cmd_run(const RunOptions& o, bool split) {
  auto scenario = load_valid(o.scenario);
  if (!scenario) return kInvalidInput;
  if (o.seed) scenario->knobs.seed = *o.seed;
  if (o.horizon) scenario->knobs.horizon = *o.horizon;
  if (auto problems = hcn::validate_scenario(*scenario); !problems.empty()) {
    for (const auto& p : problems) std::cerr << "error: " << p << '\n';
    return kInvalidInput;
  }

  hcn::RunResult result;
  try {
    if (split) {
      result = hcn::split_run(*scenario, hcn::SplitConfig{o.sbs_port, o.dbs_port_base});
    } else {
      result = hcn::run_scenario(*scenario);
    }
  } catch (const hcn::TransportError& e) {
    std::cerr << "transport error: " << e.what() << '\n';
    return kTransportFailure;
  } catch (const hcn::ScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidInput;
  }

  std::string trace_path = o.trace_out;
  if (trace_path.empty()) trace_path = std::filesystem::path(o.scenario).stem().string() + ".hcn-trace";
  std::ofstream out(trace_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << trace_path << '\n';
    return kInvalidInput;
  }
  hcn::write_trace(out, result.trace);

  const hcn::RunSummary summary = hcn::summarize(result);
  if (o.json_lines) {
    for (const auto& r : result.trace) std::cout << hcn::format_record_json(r) << '\n';
    std::cout << hcn::format_summary_json(summary) << '\n';
  } else {
    std::cout << "trace: " << trace_path << " (" << result.trace.size() << " records)\n"
              << hcn::format_summary(summary);
  }
  return kOk;
}

int cmd_check(const std::string& trace_path, const std::string& template_name) {
  auto tmpl = hcn::parse_template(template_name);
  if (!tmpl) {
    std::cerr << "error: unknown template " << template_name << " (expected mo or mt)\n";
    return kInvalidInput;
  }
  std::ifstream in(trace_path);
  if (!in) {
    std::cerr << "error: cannot read " << trace_path << '\n';
    return kInvalidInput;
  }
  std::vector<hcn::TraceRecord> trace;
  try {
    trace = hcn::read_trace(in);
  } catch (const hcn::TraceParseError& e) {
    std::cerr << "error: " << trace_path << ": " << e.what() << '\n';
    return kInvalidInput;
  }
  const hcn::CheckReport report = hcn::check_template(trace, *tmpl);
  if (report.pass) {
    std::cout << "PASS " << template_name << ": " << report.calls_checked << " call(s) conform\n";
    return kOk;
  }
  std::cout << "FAIL " << template_name << '\n';
  for (const auto& f : report.failures) std::cout << "  " << f << '\n';
  return kCheckFailed;
}

int cmd_validate(const std::string& path) {
  if (!load_valid(path)) return kInvalidInput;
  std::cout << path << ": valid\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"signaling/data split cellular network simulator"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "run a scenario");
  add_run_flags(run, run_opts, true);

  RunOptions split_opts;
  auto* split = app.add_subcommand("split-run", "run with the SBS and each DBS in separate processes over UDP");
  add_run_flags(split, split_opts, false);

  std::string trace_path, template_name;
  auto* check = app.add_subcommand("check", "check a trace against a call-flow template");
  check->add_option("--trace", trace_path, "trace file")->required();
  check->add_option("--template", template_name, "mo or mt")->required();

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "validate a scenario file");
  validate->add_option("--scenario", validate_path, "scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalidInput;
  }

  if (*run) return cmd_run(run_opts, run_opts.transport == "udp");
  if (*split) return cmd_run(split_opts, true);
  if (*check) return cmd_check(trace_path, template_name);
  if (*validate) return cmd_validate(validate_path);
  return kInvalidInput;
}
