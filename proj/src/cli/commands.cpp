#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pwcc/analysis.hpp"
#include "pwcc/cli.hpp"
#include "pwcc/model_file.hpp"

namespace pwcc::cli {

namespace {

/// Bad or missing input; maps to kConfigError.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string point_text(std::span<const double> x) {
  std::string s = "(";
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (j) s += ", ";
    s += num(x[j]);
  }
  return s + ")";
}

std::size_t density_or(const RunConfig& cfg, std::size_t fallback) {
  if (cfg.density.empty()) return fallback;
  if (cfg.density.size() != 1) throw ConfigError("--density takes a single value for this command");
  if (cfg.density[0] == 0) throw ConfigError("--density must be positive");
  return cfg.density[0];
}

Expr parse_function(const std::string& text, std::size_t dimension, const char* flag) {
  if (text.empty()) throw ConfigError(std::string("missing ") + flag);
  try {
    return parse(text, dimension);
  } catch (const ParseError& e) {
    throw ConfigError(std::string(flag) + ": " + e.what());
  }
}

Box parse_box(const RunConfig& cfg) {
  if (cfg.lower.empty() || cfg.upper.empty()) throw ConfigError("missing --lower/--upper");
  try {
    return Box(cfg.lower, cfg.upper);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void require_eps(const RunConfig& cfg) {
  if (!cfg.eps) throw ConfigError("missing --eps");
  if (!(*cfg.eps > 0.0) || !std::isfinite(*cfg.eps)) throw ConfigError("--eps must be positive");
}

void require_safety(const RunConfig& cfg) {
  if (!(cfg.safety >= 1.0)) throw ConfigError("--safety must be >= 1");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
  f.flush();
  if (!f) throw std::runtime_error("failed writing " + path);
}

void write_report(const RunConfig& cfg, const ErrorReport& r) {
  if (cfg.report) write_text(*cfg.report, report_json(r));
}

void print_report(std::ostream& out, const ErrorReport& r) {
  out << "max_error = " << num(r.max_abs_error) << " at x = " << point_text(r.argmax_point)
      << " (" << r.samples_used << " samples)\n";
}

/// Exception boundary shared by all commands.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ModelError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const GuardError& e) {
    err << "error: " << e.what() << "\n";
    return kBuildError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kBuildError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kBuildError;
  }
}

double lipschitz_for(const RunConfig& cfg, const Expr& f, double lower, double upper,
                     const double* given, std::ostream& out, const std::string& label) {
  if (given != nullptr) {
    if (!(*given > 0.0)) throw ConfigError("kappa must be positive");
    out << label << "kappa = " << num(*given) << " (given)\n";
    return *given;
  }
  const double k = estimate_lipschitz(f, lower, upper, cfg.lipschitz_samples, cfg.safety);
  out << label << "kappa = " << num(k) << " (estimated, heuristic, safety " << num(cfg.safety)
      << ")\n";
  return k;
}

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> x;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t\r");
    const auto e = item.find_last_not_of(" \t\r");
    if (b == std::string::npos) throw ConfigError("empty coordinate in '" + text + "'");
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(item.data() + b, item.data() + e + 1, v);
    if (ec != std::errc{} || ptr != item.data() + e + 1) {
      throw ConfigError("not a number: '" + item + "'");
    }
    x.push_back(v);
  }
  if (x.empty()) throw ConfigError("empty point");
  return x;
}

std::vector<std::vector<double>> read_points_csv(const std::string& path, std::size_t dimension) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": missing header");
  std::string expected;
  for (std::size_t j = 0; j < dimension; ++j) expected += (j ? ",x" : "x") + std::to_string(j + 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected) throw ConfigError(path + ": header must be '" + expected + "'");
  std::vector<std::vector<double>> pts;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    pts.push_back(parse_point(line));
  }
  return pts;
}

std::string winner_text(const ModelFile& m, std::span<const double> x) {
  if (const auto* sf = std::get_if<SumForm>(&m.payload)) {
    std::string s;
    for (std::size_t w : sumform_winners(*sf, x)) s += (s.empty() ? "" : ";") + std::to_string(w);
    return s;
  }
  return std::to_string(eval_pwc(std::get<PwcFunction>(m.payload), x).winner);
}

ModelFile load_or_config_error(const std::string& path) {
  if (path.empty()) throw ConfigError("missing --model");
  try {
    return load_model(path);
  } catch (const ModelError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

std::string csv_header(std::size_t n) {
  std::string h;
  for (std::size_t j = 0; j < n; ++j) h += "x" + std::to_string(j + 1) + ",";
  return h + "p,winner";
}

/// Property lines; returns true when every check passed.
bool print_properties(std::ostream& out, const PropertyReport& r, const std::string& prefix) {
  for (const auto& c : r.checks) {
    out << prefix << (c.passed ? "PASS " : "FAIL ") << c.name << " margin=" << num(c.margin);
    if (!c.passed || !c.witness.empty()) out << " witness x=" << point_text(c.witness);
    if (c.piece) out << " piece=" << *c.piece;
    out << "\n";
  }
  return r.all_passed();
}

}  // namespace

int cmd_approx_uni(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Expr f = parse_function(cfg.function, 1, "--function");
    require_eps(cfg);
    require_safety(cfg);
    if (cfg.lower.size() != 1 || cfg.upper.size() != 1) {
      throw ConfigError("--lower and --upper take one value each");
    }
    if (!(cfg.lower[0] < cfg.upper[0])) throw ConfigError("--lower must be below --upper");
    if (cfg.kappa.size() > 1) throw ConfigError("--kappa takes one value");
    const double eps = *cfg.eps;
    const double lo = cfg.lower[0];
    const double hi = cfg.upper[0];

    const double* given = cfg.kappa.empty() ? nullptr : &cfg.kappa[0];
    const double kappa = lipschitz_for(cfg, f, lo, hi, given, out, "");
    const UnivariateModel m = build_univariate(f, lo, hi, LipschitzConstant(kappa), eps);

    const double bound = 2.5 * kappa * m.grid.delta;
    const auto extra = random_points(m.p.domain(), cfg.random_samples, cfg.seed);
    const ErrorReport r =
        sup_error(f, m.p, univariate_error_grid(m.grid, density_or(cfg, 20)), extra, bound);

    Provenance meta;
    meta.builder = "univariate";
    meta.eps = eps;
    meta.kappa = kappa;
    meta.delta = m.grid.delta;
    meta.n_p = m.grid.n_p;
    meta.achieved_error = r.max_abs_error;
    save_model({m.p, meta}, cfg.out.value_or("model.json"));
    write_report(cfg, r);

    out << "n_p = " << m.grid.n_p << ", delta = " << num(m.grid.delta) << "\n";
    print_report(out, r);
    out << "bound 2.5*kappa*delta = " << num(bound) << (r.bound_satisfied ? " (holds)" : " (VIOLATED)")
        << "\n";
    const bool ok = r.max_abs_error <= eps;
    out << (ok ? "max_error <= eps = " : "max_error > eps = ") << num(eps) << "\n";
    return ok ? kOk : kBoundViolated;
  });
}

int cmd_approx_c2(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Box box = parse_box(cfg);
    const Expr f = parse_function(cfg.function, box.dimension(), "--function");
    require_safety(cfg);
    if (cfg.grid < 2) throw ConfigError("--grid must be at least 2");
    if (cfg.target_eps && !(*cfg.target_eps > 0.0)) throw ConfigError("--target-eps must be positive");

    DcParams params;
    params.grid_per_axis = cfg.grid;
    params.gradient_step = cfg.gradient_step;
    params.hessian_step = cfg.hessian_step;
    bool heuristic = false;
    if (cfg.mu) {
      if (!(*cfg.mu >= 0.0)) throw ConfigError("--mu must be >= 0");
      params.mu = *cfg.mu;
      out << "mu = " << num(params.mu) << " (given)\n";
    } else {
      const MuEstimate est = estimate_mu(f, box, cfg.mu_samples, cfg.safety, cfg.hessian_step);
      params.mu = est.mu;
      heuristic = true;
      out << "mu = " << num(params.mu) << " (estimated, heuristic: sampled min Hessian eigenvalue "
          << num(est.min_hessian_eigenvalue) << " at x = " << point_text(est.argmin) << ")\n";
    }

    const C2Fit fit = fit_c2(f, box, params, density_or(cfg, 10), cfg.target_eps);
    Provenance meta;
    meta.builder = "dc";
    meta.eps = cfg.target_eps;
    meta.mu = params.mu;
    meta.mu_heuristic = heuristic;
    meta.grid_per_axis = fit.model.params.grid_per_axis;
    meta.achieved_error = fit.report.max_abs_error;
    save_model({fit.model.p, meta}, cfg.out.value_or("model.json"));
    write_report(cfg, fit.report);

    out << "grid_per_axis = " << fit.model.params.grid_per_axis << ", pieces = " << fit.model.p.size()
        << "\n";
    print_report(out, fit.report);
    if (!cfg.target_eps) return kOk;
    out << (fit.report.bound_satisfied ? "max_error <= target_eps = " : "max_error > target_eps = ")
        << num(*cfg.target_eps) << "\n";
    return fit.report.bound_satisfied ? kOk : kBoundViolated;
  });
}

int cmd_approx_sep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (cfg.components.empty()) throw ConfigError("missing --component");
    const Box box = parse_box(cfg);
    const std::size_t n = box.dimension();
    if (cfg.components.size() != n) {
      throw ConfigError("need one --component per coordinate of the box");
    }
    require_eps(cfg);
    require_safety(cfg);
    if (!cfg.kappa.empty() && cfg.kappa.size() != n) throw ConfigError("--kappa needs one value per component");

    std::vector<SeparableTerm> terms;
    std::string whole;
    for (std::size_t j = 0; j < n; ++j) {
      const Expr full = parse_function(cfg.components[j], n, "--component");
      Expr uni = [&] {
        try {
          return full.restrict_to_axis(j);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      }();
      const double* given = cfg.kappa.empty() ? nullptr : &cfg.kappa[j];
      const double kappa = lipschitz_for(cfg, uni, box.lower(j), box.upper(j), given, out,
                                         "x" + std::to_string(j + 1) + ": ");
      terms.push_back({std::move(uni), LipschitzConstant(kappa)});
      whole += (j ? "+(" : "(") + cfg.components[j] + ")";
    }
    const Expr fs = parse_function(whole, n, "--component");

    std::optional<std::vector<double>> split;
    if (!cfg.eps_split.empty()) split = cfg.eps_split;
    const SeparableModel m = [&] {
      try {
        return build_separable(terms, box, *cfg.eps, split);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }();

    const auto extra = random_points(box, cfg.random_samples, cfg.seed);
    const ErrorReport r =
        sup_error(fs, m.p, separable_error_grid(m.grids, density_or(cfg, 2)), extra, *cfg.eps);

    Provenance meta;
    meta.builder = "separable";
    meta.eps = *cfg.eps;
    meta.achieved_error = r.max_abs_error;
    ModelFile file{m.p, meta};
    if (n == 1) {
      // a single coordinate is an ordinary univariate model
      file.payload = m.p.component(0);
      file.meta.kappa = m.kappas[0];
      file.meta.delta = m.grids[0].delta;
      file.meta.n_p = m.grids[0].n_p;
    } else {
      file.meta.kappas = m.kappas;
      file.meta.eps_split = m.eps_split;
      std::vector<double> deltas;
      for (const auto& g : m.grids) deltas.push_back(g.delta);
      file.meta.deltas = deltas;
      if (cfg.expand) file.payload = expand_sumform(m.p, cfg.max_pieces);
    }
    save_model(file, cfg.out.value_or("model.json"));
    write_report(cfg, r);

    for (std::size_t j = 0; j < n; ++j) {
      out << "x" << j + 1 << ": n_p = " << m.grids[j].n_p << ", eps_j = " << num(m.eps_split[j])
          << "\n";
    }
    out << "kind = " << (file.is_sumform() ? "sumform" : "pwc") << "\n";
    print_report(out, r);
    out << (r.bound_satisfied ? "max_error <= eps = " : "max_error > eps = ") << num(*cfg.eps)
        << "\n";
    return r.bound_satisfied ? kOk : kBoundViolated;
  });
}

int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ModelFile m = load_or_config_error(cfg.model);
    const std::size_t n = m.dimension();
    std::vector<std::vector<double>> pts;
    if (!cfg.point.empty()) pts.push_back(parse_point(cfg.point));
    if (!cfg.points_csv.empty()) {
      auto more = read_points_csv(cfg.points_csv, n);
      pts.insert(pts.end(), more.begin(), more.end());
    }
    if (pts.empty()) throw ConfigError("give --point or --points");
    for (const auto& x : pts) {
      if (x.size() != n) {
        throw ConfigError("point " + point_text(x) + " has dimension " + std::to_string(x.size()) +
                          ", model expects " + std::to_string(n));
      }
    }
    out << csv_header(n) << "\n";
    for (const auto& x : pts) {
      for (double v : x) out << num(v) << ",";
      out << num(eval_model(m, x)) << "," << winner_text(m, x) << "\n";
    }
    return kOk;
  });
}

int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (cfg.function.empty()) throw ConfigError("missing --function");
    const ModelFile m = load_or_config_error(cfg.model);
    const std::size_t n = m.dimension();
    const Expr f = parse_function(cfg.function, n, "--function");
    const auto extra = random_points(m.domain(), cfg.random_samples, cfg.seed);
    bool ok = true;

    auto uni_grid = [](const PwcFunction& p, std::size_t n_p) {
      UniGrid g;
      g.lower = p.domain().lower(0);
      g.upper = p.domain().upper(0);
      g.n_p = n_p;
      g.delta = (g.upper - g.lower) / static_cast<double>(n_p);
      return g;
    };
    auto run_properties = [&](const Expr& fj, const PwcFunction& p, const UniGrid& g, double kappa,
                              const std::string& prefix) {
      try {
        return print_properties(out, check_properties(fj, p, g, kappa, density_or(cfg, 10)), prefix);
      } catch (const std::invalid_argument& e) {
        out << prefix << "FAIL model/grid mismatch: " << e.what() << "\n";
        return false;
      }
    };

    ErrorReport r;
    if (const auto* sf = std::get_if<SumForm>(&m.payload)) {
      const auto& kappas = m.meta.kappas;
      std::vector<UniGrid> grids;
      for (std::size_t j = 0; j < n; ++j) grids.push_back(uni_grid(sf->component(j), sf->component(j).size()));
      r = sup_error(f, *sf, separable_error_grid(grids, density_or(cfg, 2)), extra, m.meta.eps);
      if (!cfg.components.empty()) {
        if (cfg.components.size() != n || !kappas || kappas->size() != n) {
          throw ConfigError("per-component checks need one --component per coordinate and kappas in the model");
        }
        for (std::size_t j = 0; j < n; ++j) {
          Expr fj = parse_function(cfg.components[j], n, "--component").restrict_to_axis(j);
          ok &= run_properties(fj, sf->component(j), grids[j], (*kappas)[j],
                               "x" + std::to_string(j + 1) + ": ");
        }
      }
    } else {
      const auto& p = std::get<PwcFunction>(m.payload);
      std::optional<double> bound = m.meta.eps;
      if (n == 1 && m.meta.kappa && m.meta.n_p) {
        const UniGrid g = uni_grid(p, *m.meta.n_p);
        ok &= run_properties(f, p, g, *m.meta.kappa, "");
        const double analytic = 2.5 * *m.meta.kappa * g.delta;
        bound = bound ? std::min(*bound, analytic) : analytic;
        if (p.size() == g.n_p) {
          r = sup_error(f, p, univariate_error_grid(g, density_or(cfg, 10)), extra, bound);
        } else {
          r = sup_error(f, p, TensorGrid::uniform(p.domain(), 100'001), extra, bound);
        }
      } else {
        const std::size_t g = m.meta.grid_per_axis.value_or(11);
        r = sup_error(f, p, dc_error_grid(p.domain(), g, density_or(cfg, 10)), extra, bound);
      }
    }
    write_report(cfg, r);
    print_report(out, r);
    if (r.bound) {
      out << (r.bound_satisfied ? "PASS" : "FAIL") << " sup error <= " << num(*r.bound) << "\n";
    }
    ok &= r.bound_satisfied;
    out << (ok ? "all checks passed" : "check FAILED") << "\n";
    return ok ? kOk : kBoundViolated;
  });
}

int cmd_study(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Expr f = parse_function(cfg.function, 1, "--function");
    require_safety(cfg);
    if (cfg.lower.size() != 1 || cfg.upper.size() != 1 || !(cfg.lower[0] < cfg.upper[0])) {
      throw ConfigError("--lower/--upper must be one value each with lower < upper");
    }
    if (cfg.deltas.empty()) throw ConfigError("missing --deltas");
    for (double d : cfg.deltas) {
      if (!(d > 0.0) || !std::isfinite(d)) throw ConfigError("--deltas entries must be positive");
    }
    if (cfg.kappa.size() > 1) throw ConfigError("--kappa takes one value");
    const double* given = cfg.kappa.empty() ? nullptr : &cfg.kappa[0];
    const double kappa = lipschitz_for(cfg, f, cfg.lower[0], cfg.upper[0], given, out, "");

    const auto rows = convergence_study(f, cfg.lower[0], cfg.upper[0], kappa, cfg.deltas);
    std::ostringstream csv;
    write_study_csv(csv, rows);
    write_text(cfg.out.value_or("study.csv"), csv.str());
    out << csv.str();
    const bool ok = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.ratio <= 1.0; });
    return ok ? kOk : kBoundViolated;
  });
}

int cmd_sample(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ModelFile m = load_or_config_error(cfg.model);
    const std::size_t n = m.dimension();
    std::vector<std::size_t> per_axis = cfg.density.empty() ? std::vector<std::size_t>{101} : cfg.density;
    if (per_axis.size() == 1) per_axis.assign(n, per_axis[0]);
    if (per_axis.size() != n) throw ConfigError("--density needs one value or one per coordinate");
    std::vector<std::vector<double>> axes;
    for (std::size_t j = 0; j < n; ++j) {
      if (per_axis[j] < 2) throw ConfigError("--density must be at least 2 per axis");
      axes.push_back(linspace(m.domain().lower(j), m.domain().upper(j), per_axis[j]));
    }
    const TensorGrid grid(std::move(axes));
    if (grid.size() > kMaxErrorSamples) throw GuardError("too many sample rows requested");

    const std::string path = cfg.out.value_or("samples.csv");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << csv_header(n) << "\n";
    std::vector<double> x;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      grid.point(k, x);
      for (double v : x) f << num(v) << ",";
      f << num(eval_model(m, x)) << "," << winner_text(m, x) << "\n";
    }
    f.flush();
    if (!f) throw std::runtime_error("failed writing " + path);
    out << "wrote " << grid.size() << " rows to " << path << "\n";
    return kOk;
  });
}

}  // namespace pwcc::cli
