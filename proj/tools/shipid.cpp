// shipid: generate synthetic maneuvers, estimate ship parameters, validate
// and simulate identified models.
//
// Exit codes: 0 success (possibly with warnings), 1 runtime or I/O failure,
// 2 usage or validation failure.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "CLI11.hpp"

#include "shipid/shipid.hpp"

namespace fs = std::filesystem;
using namespace shipid;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kValidation:
    case ErrorKind::kParse:
    case ErrorKind::kInsufficientData:
    case ErrorKind::kUnidentifiable:
      return kExitUsage;
    case ErrorKind::kDegenerateParameters:
    case ErrorKind::kIntegrationBlowup:
    case ErrorKind::kIo:
    case ErrorKind::kSolver:
      return kExitRuntime;
  }
  return kExitRuntime;
}

/// SHIPID_THREADS caps the worker count; otherwise all hardware threads.
unsigned thread_budget() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SHIPID_THREADS")) {
    unsigned cap = 0;
    const std::string_view s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), cap);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || cap == 0) {
      throw Error(ErrorKind::kValidation, "SHIPID_THREADS must be a positive integer");
    }
    hw = std::min(hw, cap);
  }
  return hw;
}

GlobalConfig load_config(const std::string& path) {
  return path.empty() ? GlobalConfig{} : load_global_config(path);
}

using AnyParams = std::variant<ShipParams22, ShipParams6>;

/// Accepts a parameter file (22 or 6 keys, object or array) or an
/// estimation result document, in which case its "parameters" are used.
AnyParams load_any_params(const fs::path& path) {
  Json j = detail::read_json_file(path);
  try {
    if (j.is_object() && j.contains("schema")) {
      if (j["schema"] != kEstimationResultSchema) {
        throw Error(ErrorKind::kValidation, "unsupported document schema");
      }
      const bool six = j.value("model", std::string()) == "6-parameter";
      j = j.at("parameters");
      if (six) return params_from_json<ShipParams6>(j);
      return params_from_json<ShipParams22>(j);
    }
    const bool six = (j.is_array() && j.size() == ShipParams6::kSize) ||
                     (j.is_object() && j.contains("d11"));
    if (six) return params_from_json<ShipParams6>(j);
    return params_from_json<ShipParams22>(j);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, path.string() + ": " + e.what());
  }
}

std::vector<std::size_t> parse_horizons(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string_view item(text.data() + start, comma - start);
    std::size_t h = 0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), h);
    if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size() || h == 0) {
      throw Error(ErrorKind::kValidation, "horizons must be positive integers, got '" + text + "'");
    }
    out.push_back(h);
    start = comma + 1;
  }
  if (out.empty()) throw Error(ErrorKind::kValidation, "horizon list is empty");
  return out;
}

/// "alpha1,alpha2,x,y,psi,u,v,r" with angles in degrees and r in deg/s.
ShipState parse_x0(const std::string& text) {
  std::vector<double> v;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    v.push_back(detail::parse_double(std::string_view(text).substr(start, comma - start), 0, "x0"));
    start = comma + 1;
  }
  if (v.size() != 8) {
    throw Error(ErrorKind::kValidation, "--x0 needs 8 values: alpha1,alpha2,x,y,psi,u,v,r");
  }
  return ShipState{deg_to_rad(v[0]), deg_to_rad(v[1]), {v[2], v[3], deg_to_rad(v[4])},
                   {v[5], v[6], deg_to_rad(v[7])}};
}

void print_provenance(const std::vector<Attempt>& attempts) {
  for (const auto& a : attempts) {
    std::cout << "  stage " << a.stage << "  " << to_string(a.method) << " from " << a.start
              << ": " << to_string(a.status) << ", cost " << a.cost << ", " << a.iterations
              << " iterations" << (a.success ? "" : " (failed)") << "\n";
  }
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string params;
  std::string scenario;
  std::string out;
};

int cmd_generate(const GenerateArgs& args, const GlobalConfig& cfg,
                 std::optional<std::uint64_t> seed) {
  Scenario scenario = cfg.scenario;
  if (!args.scenario.empty()) {
    scenario = scenario_from_json(detail::read_json_file(args.scenario), cfg.dt);
  }
  if (seed) scenario.noise.seed = *seed;
  const ThrusterModel& thr = cfg.estimation.thruster;
  const AnyParams truth =
      args.params.empty() ? AnyParams(reference_tug_params()) : load_any_params(args.params);
  const Dataset d = std::visit(
      [&](const auto& p) { return generate_dataset(scenario.plans, p, thr, scenario.noise); },
      truth);
  const auto manifest = save_dataset(d, args.out);
  std::cout << "wrote " << d.maneuvers.size() << " maneuvers (" << d.total_samples()
            << " samples) to " << manifest.string() << "\n";
  return kExitOk;
}

struct EstimateArgs {
  std::string manifest;
  std::string out;
  std::string params_out;
  std::string mode;
  std::string init = "empirical";
  std::string specs;
  std::string params;
  std::string model = "22";
  bool trace = false;
  bool paper_literal = false;
};

int cmd_estimate(const EstimateArgs& args, GlobalConfig cfg) {
  EstimationConfig ec = cfg.estimation;
  if (!args.mode.empty()) ec.mode = mode_from_string(args.mode);
  if (args.paper_literal) ec.paper_literal_constraints = true;
  ec.solver.threads = thread_budget();

  const Dataset dataset = with_velocities(load_dataset(args.manifest));
  const HullSpecs specs =
      args.specs.empty() ? cfg.specs : specs_from_json(detail::read_json_file(args.specs));

  ResultContext ctx;
  ctx.include_trace = args.trace;
  if (args.init == "empirical") {
    const auto t = strip_theory_terms(specs);
    ctx.init_source = Json{{"method", "empirical"},
                           {"specs", specs_to_json(specs)},
                           {"X_udot", t.X_udot},
                           {"Y_vdot", t.Y_vdot},
                           {"N_rdot", t.N_rdot},
                           {"I_z", t.I_z}};
  } else if (args.init == "params") {
    if (args.params.empty()) throw Error(ErrorKind::kValidation, "--init params needs --params");
    ctx.init_source = Json{{"method", "params"}, {"path", args.params}};
  } else {
    throw Error(ErrorKind::kValidation, "--init must be 'empirical' or 'params'");
  }

  Json doc;
  bool degraded = false;
  if (args.model == "6") {
    const ShipParams6 p0 = args.init == "params" ? load_params<ShipParams6>(args.params)
                                                 : init_params6_empirical(specs);
    ctx.mode = "lo+go";
    ctx.initial = params_to_json(p0);
    ctx.config = ec;
    const auto result = estimate_6param(dataset, ec, p0);
    degraded = result.degraded;
    print_provenance(result.provenance);
    doc = estimation_result_to_json(result, ctx);
    if (!args.params_out.empty()) save_params(result.best(), args.params_out);
  } else if (args.model == "22") {
    const ShipParams22 p0 = args.init == "params" ? load_params<ShipParams22>(args.params)
                                                  : init_params_empirical(specs);
    ctx.mode = to_string(ec.mode);
    ctx.initial = params_to_json(p0);
    ctx.config = ec;
    const auto result = estimate(dataset, p0, ec);
    degraded = result.degraded;
    print_provenance(result.provenance);
    doc = estimation_result_to_json(result, ctx);
    if (!args.params_out.empty()) save_params(result.best(), args.params_out);
  } else {
    throw Error(ErrorKind::kValidation, "--model must be 22 or 6");
  }
  detail::write_json_file(doc, args.out);
  if (degraded) {
    std::cerr << "warning: GO did not converge on the full dataset; the result holds the LO "
                 "estimate and is flagged degraded\n";
  }
  std::cout << "wrote " << args.out << "\n";
  return kExitOk;
}

struct ValidateArgs {
  std::string manifest;
  std::string params;
  std::string horizons;
  std::string out;
  std::string compare;
};

int cmd_validate(const ValidateArgs& args, const GlobalConfig& cfg) {
  const Dataset dataset = with_velocities(load_dataset(args.manifest));
  const std::vector<std::size_t> horizons =
      args.horizons.empty() ? cfg.horizons : parse_horizons(args.horizons);
  const ThrusterModel& thr = cfg.estimation.thruster;
  const AnyParams model = load_any_params(args.params);

  const auto suite = std::visit(
      [&](const auto& p) { return validation_suite(p, thr, dataset, horizons, args.out); }, model);
  const std::size_t nh = horizons.size();
  std::cout << "horizon  mean RMSE u        v            r\n";
  for (std::size_t h = 0; h < nh; ++h) {
    ChannelValues mean{};
    for (std::size_t m = 0; m < dataset.maneuvers.size(); ++m) {
      for (std::size_t c = 0; c < kChannelCount; ++c) {
        mean[c] += suite.reports[m * nh + h].rmse[c] / static_cast<double>(dataset.maneuvers.size());
      }
    }
    std::printf("%7zu  %-12.6g %-12.6g %-12.6g\n", horizons[h], mean[kU], mean[kV], mean[kR]);
  }

  if (!args.compare.empty()) {
    const auto colon = args.compare.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == args.compare.size()) {
      throw Error(ErrorKind::kValidation, "--compare expects NAME:PATH");
    }
    const std::string name = args.compare.substr(0, colon);
    const AnyParams other = load_any_params(args.compare.substr(colon + 1));
    ComparisonReport report = std::visit(
        [&](const auto& a, const auto& b) { return relative_error_table(a, b, thr, dataset); },
        model, other);
    report.name_a = "model";
    report.name_b = name;
    write_comparison_csv(report, fs::path(args.out) / "comparison.csv");
    detail::write_json_file(comparison_json(report), fs::path(args.out) / "comparison.json");
    std::cout << "\nrelative error (%)       model        " << name << "\n";
    for (std::size_t i = 0; i < kComparisonVariables; ++i) {
      std::printf("%-22s %-12s %-12s\n", kComparisonNames[i], detail::cell(report.model_a[i]).c_str(),
                  detail::cell(report.model_b[i]).c_str());
    }
  }
  std::cout << "reports written to " << args.out << "\n";
  return kExitOk;
}

struct SimulateArgs {
  std::string params;
  std::string commands;
  std::string x0;
  std::string out;
};

int cmd_simulate(const SimulateArgs& args, const GlobalConfig& cfg) {
  const AnyParams model = load_any_params(args.params);
  const auto [cmds, dt] = load_command_csv(args.commands);
  const ShipState x0 = args.x0.empty() ? ShipState{} : parse_x0(args.x0);
  const auto traj = std::visit(
      [&](const auto& p) { return simulate(p, cfg.estimation.thruster, x0, cmds, dt); }, model);
  export_trajectory_csv(traj, 0.0, dt, args.out);
  std::cout << "wrote " << traj.size() << " states to " << args.out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ship maneuvering-model identification toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "Global JSON configuration")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Random seed (overrides the scenario seed)");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Simulate maneuvers and write a dataset");
  generate->add_option("--params", gen.params, "Ground-truth parameter JSON (default: reference tug)")
      ->check(CLI::ExistingFile);
  generate->add_option("--scenario", gen.scenario, "Scenario JSON (plans and noise)")
      ->check(CLI::ExistingFile);
  generate->add_option("--out", gen.out, "Output directory")->required();

  EstimateArgs est;
  auto* estimate_cmd = app.add_subcommand("estimate", "Estimate model parameters from a dataset");
  estimate_cmd->add_option("--manifest", est.manifest, "Dataset manifest JSON")
      ->required()
      ->check(CLI::ExistingFile);
  estimate_cmd->add_option("--out", est.out, "Estimation result JSON")->required();
  estimate_cmd->add_option("--params-out", est.params_out, "Also write the parameters alone");
  estimate_cmd->add_option("--mode", est.mode, "Estimation mode")
      ->check(CLI::IsMember({"lo", "go", "combined"}));
  estimate_cmd->add_option("--init", est.init, "Initial guess source")
      ->check(CLI::IsMember({"empirical", "params"}));
  estimate_cmd->add_option("--specs", est.specs, "Hull specs JSON for empirical initialization")
      ->check(CLI::ExistingFile);
  estimate_cmd->add_option("--params", est.params, "Initial parameter JSON (with --init params)")
      ->check(CLI::ExistingFile);
  estimate_cmd->add_option("--model", est.model, "Model structure")
      ->check(CLI::IsMember({"22", "6"}));
  estimate_cmd->add_flag("--trace", est.trace, "Include solver traces in the result");
  estimate_cmd->add_flag("--paper-literal-constraints", est.paper_literal,
                         "Use X_u (not -X_u) in the stability constraints");

  ValidateArgs val;
  auto* validate = app.add_subcommand("validate", "N-step prediction reports and plots");
  validate->add_option("--manifest", val.manifest, "Dataset manifest JSON")
      ->required()
      ->check(CLI::ExistingFile);
  validate->add_option("--params", val.params, "Parameter or estimation result JSON")
      ->required()
      ->check(CLI::ExistingFile);
  validate->add_option("--horizons", val.horizons, "Comma-separated horizons in steps");
  validate->add_option("--out", val.out, "Output directory")->required();
  validate->add_option("--compare", val.compare, "NAME:PATH of a second model to compare");

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Roll a model forward under logged commands");
  simulate_cmd->add_option("--params", sim.params, "Parameter or estimation result JSON")
      ->required()
      ->check(CLI::ExistingFile);
  simulate_cmd->add_option("--commands", sim.commands, "Command CSV t,n1,n2,alpha1_cmd,alpha2_cmd")
      ->required()
      ->check(CLI::ExistingFile);
  simulate_cmd->add_option("--x0", sim.x0,
                           "Initial state alpha1,alpha2,x,y,psi,u,v,r (degrees, deg/s)");
  simulate_cmd->add_option("--out", sim.out, "Trajectory CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    GlobalConfig cfg = load_config(config_path);
    if (seed) cfg.seed = seed;
    if (cfg.seed) cfg.scenario.noise.seed = *cfg.seed;
    if (*generate) return cmd_generate(gen, cfg, cfg.seed);
    if (*estimate_cmd) return cmd_estimate(est, cfg);
    if (*validate) return cmd_validate(val, cfg);
    if (*simulate_cmd) return cmd_simulate(sim, cfg);
  } catch (const IntegrationBlowup& e) {
    std::cerr << "error: " << e.what() << " (step " << e.step() << ")\n";
    return kExitRuntime;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
