#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "gradopt/experiment.hpp"

using namespace gradopt;

namespace {

void write_or_print(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream o(path);
  if (!o) throw ConfigError("cannot write '" + path + "'");
  o << text << "\n";
}

int cmd_run(const std::string& path) {
  RunConfig cfg = load_config(path);
  Report r = run_experiment(cfg);
  for (const auto& s : r.seeds) {
    if (!s.error.empty())
      std::cerr << "seed " << s.seed << ": " << s.error << "\n";
  }
  std::cout << "runs " << r.seeds.size() << "  successes " << r.successes << "  rate "
            << r.success_rate << "  ci95 [" << r.ci_low << ", " << r.ci_high << "]  mean excess "
            << r.mean_excess << "\n";
  if (cfg.report.empty()) std::cout << report_json(r) << "\n";
  return r.failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graduated optimization experiment runner"};
  app.require_subcommand(1);

  std::string run_cfg;
  auto* run = app.add_subcommand("run", "run every seed of a config, write traces and a report");
  run->add_option("config", run_cfg, "config file")->required();

  std::string cmp_a, cmp_b, cmp_out;
  auto* cmp = app.add_subcommand("compare", "paired per-seed comparison of two configs");
  cmp->add_option("config_a", cmp_a)->required();
  cmp->add_option("config_b", cmp_b)->required();
  cmp->add_option("-o,--output", cmp_out, "write the comparison JSON here");

  std::string tb_name, tb_out;
  auto* ver = app.add_subcommand("verify-testbed", "check the sigma-nice certificate of a testbed");
  ver->add_option("name", tb_name, "testbed1d, testbed2d or wobble_counterexample")->required();
  ver->add_option("-o,--output", tb_out, "write the report JSON here");

  std::string sch_cfg;
  auto* sch = app.add_subcommand("schedule", "print the epoch schedule of a config");
  sch->add_option("config", sch_cfg)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_cfg);
    if (*cmp) {
      Comparison c = compare_experiments(load_config(cmp_a), load_config(cmp_b));
      std::cerr << "A better " << c.a_better << "  B better " << c.b_better << "  ties " << c.ties
                << "  sign test p " << c.sign_test_p << "\n";
      write_or_print(comparison_json(c), cmp_out);
      return c.a.failed || c.b.failed ? 2 : 0;
    }
    if (*ver) {
      Testbed tb = make_testbed(tb_name);
      NiceReport r = verify_sigma_nice(*tb.objective, tb.spec, tb.set);
      write_or_print(nice_report_json(r, tb_name), tb_out);
      return r.pass ? 0 : 1;
    }
    if (*sch) {
      RunConfig cfg = load_config(sch_cfg);
      std::cout << schedule_json(schedule_for(cfg, resolve_testbed(cfg))) << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 3;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
