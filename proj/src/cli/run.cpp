#include <functional>
#include <map>

#include "CLI11.hpp"
#include "pwcc/cli.hpp"

namespace pwcc::cli {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Piecewise-concave approximation toolkit", "pwcc"};
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--out", cfg.out, "Output file (model JSON or CSV)");
  app.add_option("--seed", cfg.seed, "Seed for random extra sample points")->capture_default_str();
  app.add_option("--density", cfg.density, "Sampling density (per subinterval, per cell, or per axis)")
      ->delimiter(',');
  app.add_option("--safety", cfg.safety, "Safety factor for estimated constants")->capture_default_str();

  auto function_opt = [&](CLI::App* sub) { sub->add_option("--function", cfg.function, "Target f(x1..xn)"); };
  auto box_opts = [&](CLI::App* sub) {
    sub->add_option("--lower", cfg.lower, "Lower bounds (comma separated)")->delimiter(',');
    sub->add_option("--upper", cfg.upper, "Upper bounds (comma separated)")->delimiter(',');
  };
  auto report_opt = [&](CLI::App* sub) {
    sub->add_option("--report", cfg.report, "Write the error report as JSON");
    sub->add_option("--random-samples", cfg.random_samples, "Extra random error samples")
        ->capture_default_str();
  };

  std::map<CLI::App*, std::function<int()>> dispatch;

  auto* uni = app.add_subcommand("approx-uni", "Univariate Lipschitz construction");
  function_opt(uni);
  box_opts(uni);
  uni->add_option("--eps", cfg.eps, "Target sup-norm error");
  uni->add_option("--kappa", cfg.kappa, "Lipschitz constant (estimated if absent)");
  uni->add_option("--lipschitz-samples", cfg.lipschitz_samples, "Samples per unit length for kappa")
      ->capture_default_str();
  report_opt(uni);
  dispatch[uni] = [&] { return cmd_approx_uni(cfg, out, err); };

  auto* c2 = app.add_subcommand("approx-c2", "Convexify-and-linearise construction for C2 functions");
  function_opt(c2);
  box_opts(c2);
  c2->add_option("--mu", cfg.mu, "Convexifying shift (estimated if absent)");
  c2->add_option("--grid", cfg.grid, "Tangent points per axis")->capture_default_str();
  c2->add_option("--target-eps", cfg.target_eps, "Refine the grid until the sampled error meets this");
  c2->add_option("--mu-samples", cfg.mu_samples, "Curvature samples per axis")->capture_default_str();
  c2->add_option("--gradient-step", cfg.gradient_step)->capture_default_str();
  c2->add_option("--hessian-step", cfg.hessian_step)->capture_default_str();
  report_opt(c2);
  dispatch[c2] = [&] { return cmd_approx_c2(cfg, out, err); };

  auto* sep = app.add_subcommand("approx-sep", "Separable construction, one component per coordinate");
  sep->add_option("--component", cfg.components, "Component j as a function of xj (repeat per coordinate)");
  box_opts(sep);
  sep->add_option("--eps", cfg.eps, "Target sup-norm error of the sum");
  sep->add_option("--kappa", cfg.kappa, "Per-component Lipschitz constants")->delimiter(',');
  sep->add_option("--eps-split", cfg.eps_split, "Per-component error budgets")->delimiter(',');
  sep->add_flag("--expand", cfg.expand, "Write the explicit max-form");
  sep->add_option("--max-pieces", cfg.max_pieces, "Expansion guard")->capture_default_str();
  sep->add_option("--lipschitz-samples", cfg.lipschitz_samples)->capture_default_str();
  report_opt(sep);
  dispatch[sep] = [&] { return cmd_approx_sep(cfg, out, err); };

  auto* ev = app.add_subcommand("eval", "Evaluate a model");
  ev->add_option("--model", cfg.model, "Model JSON")->required();
  ev->add_option("--point", cfg.point, "Comma separated point");
  ev->add_option("--points", cfg.points_csv, "CSV with header x1,...,xn");
  dispatch[ev] = [&] { return cmd_eval(cfg, out, err); };

  auto* chk = app.add_subcommand("check", "Certify a model against its target");
  chk->add_option("--model", cfg.model, "Model JSON")->required();
  function_opt(chk);
  chk->add_option("--component", cfg.components, "Per-coordinate components (sum-form models)");
  report_opt(chk);
  dispatch[chk] = [&] { return cmd_check(cfg, out, err); };

  auto* study = app.add_subcommand("study", "Error versus subinterval width");
  function_opt(study);
  box_opts(study);
  study->add_option("--kappa", cfg.kappa, "Lipschitz constant (estimated if absent)");
  study->add_option("--deltas", cfg.deltas, "Subinterval widths (comma separated)")->delimiter(',');
  study->add_option("--lipschitz-samples", cfg.lipschitz_samples)->capture_default_str();
  dispatch[study] = [&] { return cmd_study(cfg, out, err); };

  auto* sample = app.add_subcommand("sample", "Dump model values on a grid as CSV");
  sample->add_option("--model", cfg.model, "Model JSON")->required();
  dispatch[sample] = [&] { return cmd_sample(cfg, out, err); };

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kConfigError;
  }

  for (auto& [sub, fn] : dispatch) {
    if (sub->parsed()) return fn();
  }
  err << app.help();
  return kConfigError;
}

}  // namespace pwcc::cli
