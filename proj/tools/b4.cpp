// Command-line front end: b4 simulate|analyze|bounds|feasibility --config <file>

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "b4/config.hpp"
#include "b4/errors.hpp"
#include "b4/run.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

int dispatch(const std::string& command, const b4::RunConfig& cfg) {
  if (command == "simulate") {
    const auto s = b4::run_simulate(cfg);
    std::printf("simulate: steps %zu..%zu, t_end %.6g, dt %.6g, rows %zu, min field %.6g\n",
                s.start_step, s.final_step, s.final_time, s.dt, s.rows, s.min_value);
  } else if (command == "analyze") {
    const auto s = b4::run_analyze(cfg);
    const auto& d = s.dimension;
    std::printf("analyze: d %.4f (m %zu, tau %zu, R^2 %.4f%s), lambda1 %.5g, takens %s\n",
                d.d, d.m_used, d.tau, d.fit_r2,
                d.low_confidence ? ", low confidence" : "", s.lyapunov.lambda,
                d.takens_ok ? "ok" : "not satisfied");
  } else if (command == "bounds") {
    const auto s = b4::run_bounds(cfg);
    std::printf("bounds: base %.17g, lower %.6g, trace-unstable %zu, unstable %zu "
                "(of %zu scanned), upper %.6g\n",
                s.report.base, s.report.lower, s.report.trace_unstable_count,
                s.report.full_unstable_count, s.modes_scanned, s.report.upper);
  } else {
    const auto s = b4::run_feasibility(cfg);
    std::printf("feasibility: theta2 %.6g, sigma2 %.6g, rho2 %.6g, %zu matrices, "
                "all minors positive: %s\n",
                s.triple.theta2, s.triple.sigma2, s.triple.rho2, s.matrices_checked,
                s.all_minors_positive ? "yes" : "no");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled Brusselator simulator and attractor analysis"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string resume;
  for (const char* name : {"simulate", "analyze", "bounds", "feasibility"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides out_dir)");
    sub->add_option("--seed", seed, "random seed (overrides seed)");
    if (std::string(name) == "simulate")
      sub->add_option("--resume", resume, "checkpoint to continue from");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  const auto* sub = app.get_subcommands().front();

  try {
    b4::RunConfig cfg = b4::load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (sub->count("--seed")) cfg.seed = seed;
    if (!resume.empty()) cfg.resume = resume;
    return dispatch(command, cfg);
  } catch (const b4::ParseError& e) {
    std::cerr << "b4: " << config_path << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const b4::NumericalError& e) {
    std::cerr << "b4: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::range_error& e) {
    std::cerr << "b4: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "b4: " << e.what() << '\n';
    return kExitConfig;
  }
}
