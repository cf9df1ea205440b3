#include "pwcc/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace pwcc {

namespace {

constexpr double kMergeTolerance = 1e-12;
// samples x pieces evaluated by one tangent-plane error measurement
constexpr double kDcEvaluationBudget = 1e9;

bool lex_less(std::span<const double> a, std::span<const double> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

class MaxTracker {
 public:
  void offer(double err, std::span<const double> x) {
    ++count_;
    if (std::isnan(err)) err = std::numeric_limits<double>::infinity();
    if (count_ == 1 || err > best_ || (err == best_ && lex_less(x, point_))) {
      best_ = err;
      point_.assign(x.begin(), x.end());
    }
  }

  ErrorReport finish(std::optional<double> bound) const {
    ErrorReport r;
    r.max_abs_error = best_;
    r.argmax_point = point_;
    r.samples_used = count_;
    r.bound = bound;
    r.bound_satisfied = !bound || best_ <= *bound;
    return r;
  }

 private:
  double best_ = 0.0;
  std::vector<double> point_;
  std::size_t count_ = 0;
};

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::size_t checked_size(const TensorGrid& samples) {
  if (samples.size() > kMaxErrorSamples) {
    throw GuardError("error measurement would use " + std::to_string(samples.size()) +
                     " samples (limit " + std::to_string(kMaxErrorSamples) + ")");
  }
  return samples.size();
}

}  // namespace

double estimate_lipschitz(const Expr& f, double lower, double upper,
                          std::size_t samples_per_unit, double safety) {
  if (f.dimension() != 1) throw std::invalid_argument("Lipschitz estimate needs a 1-D function");
  if (!(lower < upper)) throw std::invalid_argument("Lipschitz estimate needs lower < upper");
  if (samples_per_unit == 0) throw std::invalid_argument("samples_per_unit must be positive");
  if (!(safety >= 1.0)) throw std::invalid_argument("safety factor must be >= 1");

  const double cells = std::ceil(static_cast<double>(samples_per_unit) * (upper - lower));
  if (cells > static_cast<double>(kMaxErrorSamples)) {
    throw GuardError("Lipschitz sampling would need " + std::to_string(cells) + " cells");
  }
  const auto xs = linspace(lower, upper, static_cast<std::size_t>(std::max(1.0, cells)) + 1);
  double steepest = 0.0;
  double prev = f(xs[0]);
  for (std::size_t k = 1; k < xs.size(); ++k) {
    const double cur = f(xs[k]);
    steepest = std::max(steepest, std::abs(cur - prev) / (xs[k] - xs[k - 1]));
    prev = cur;
  }
  if (steepest == 0.0) return 1e-12 * safety;
  return safety * steepest;
}

double sawtooth_value(double v_mid, double center, double kappa, double x) {
  return v_mid - kappa * std::abs(x - center);
}

std::vector<double> axis_samples(double lower, double upper, std::size_t count,
                                 std::span<const double> forced) {
  std::vector<double> keep(forced.begin(), forced.end());
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  const double tol = kMergeTolerance * std::max({1.0, std::abs(lower), std::abs(upper)});

  std::vector<double> out = keep;
  if (count >= 2) {
    for (double v : linspace(lower, upper, count)) {
      auto it = std::lower_bound(keep.begin(), keep.end(), v);
      const bool near_next = it != keep.end() && *it - v <= tol;
      const bool near_prev = it != keep.begin() && v - *std::prev(it) <= tol;
      if (!near_next && !near_prev) out.push_back(v);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> univariate_samples(const UniGrid& grid, std::size_t per_subinterval) {
  std::vector<double> forced;
  forced.reserve(2 * grid.n_p + 1);
  for (std::size_t i = 0; i <= grid.n_p; ++i) forced.push_back(grid.node(i));
  for (std::size_t i = 0; i < grid.n_p; ++i) forced.push_back(grid.midpoint(i));
  std::sort(forced.begin(), forced.end());

  const double tol = kMergeTolerance * std::max({1.0, std::abs(grid.lower), std::abs(grid.upper)});
  std::vector<double> out = forced;
  if (per_subinterval > 2) {
    const double step = grid.delta / static_cast<double>(per_subinterval);
    for (std::size_t i = 0; i < grid.n_p; ++i) {
      const double left = grid.node(i);
      for (std::size_t k = 1; k < per_subinterval; ++k) {
        const double v = left + static_cast<double>(k) * step;
        if (std::abs(v - grid.midpoint(i)) > tol && v < grid.node(i + 1) - tol) out.push_back(v);
      }
    }
    std::sort(out.begin(), out.end());
  }
  return out;
}

std::vector<std::vector<double>> random_points(const Box& box, std::size_t count,
                                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> pts(count, std::vector<double>(box.dimension()));
  for (auto& p : pts) {
    for (std::size_t j = 0; j < box.dimension(); ++j) {
      // explicit mapping keeps the stream identical across standard libraries
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      p[j] = box.lower(j) + u * box.width(j);
    }
  }
  return pts;
}

ErrorReport sup_error(const ScalarField& f, const ScalarField& p, const TensorGrid& samples,
                      std::span<const std::vector<double>> extra, std::optional<double> bound) {
  const std::size_t n = checked_size(samples);
  MaxTracker tracker;
  std::vector<double> x;
  for (std::size_t k = 0; k < n; ++k) {
    samples.point(k, x);
    tracker.offer(std::abs(f(x) - p(x)), x);
  }
  for (const auto& e : extra) tracker.offer(std::abs(f(e) - p(e)), e);
  return tracker.finish(bound);
}

ErrorReport sup_error(const Expr& f, const PwcFunction& p, const TensorGrid& samples,
                      std::span<const std::vector<double>> extra, std::optional<double> bound) {
  return sup_error([&f](std::span<const double> x) { return f(x); },
                   [&p](std::span<const double> x) { return eval_pwc(p, x).value; }, samples,
                   extra, bound);
}

ErrorReport sup_error(const Expr& f, const SumForm& p, const TensorGrid& samples,
                      std::span<const std::vector<double>> extra, std::optional<double> bound) {
  if (samples.dimension() != p.dimension()) throw std::invalid_argument("sample dimension mismatch");
  const std::size_t n = checked_size(samples);
  const auto& axes = samples.axes();
  std::vector<std::vector<double>> cached(axes.size());
  for (std::size_t j = 0; j < axes.size(); ++j) {
    cached[j].reserve(axes[j].size());
    for (double v : axes[j]) cached[j].push_back(eval_pwc(p.component(j), v).value);
  }

  MaxTracker tracker;
  std::vector<double> x(axes.size());
  std::vector<std::size_t> index(axes.size(), 0);
  for (std::size_t k = 0; k < n; ++k) {
    double value = 0.0;
    for (std::size_t j = 0; j < axes.size(); ++j) {
      x[j] = axes[j][index[j]];
      value += cached[j][index[j]];
    }
    tracker.offer(std::abs(f(x) - value), x);
    for (std::size_t j = axes.size(); j-- > 0;) {
      if (++index[j] < axes[j].size()) break;
      index[j] = 0;
    }
  }
  for (const auto& e : extra) tracker.offer(std::abs(f(e) - eval_sumform(p, e)), e);
  return tracker.finish(bound);
}

std::string report_json(const ErrorReport& r) {
  nlohmann::ordered_json j;
  j["max_abs_error"] = r.max_abs_error;
  j["argmax"] = r.argmax_point;
  j["bound"] = r.bound ? nlohmann::ordered_json(*r.bound) : nlohmann::ordered_json(nullptr);
  j["pass"] = r.bound_satisfied;
  return j.dump() + "\n";
}

bool PropertyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const PropertyCheck& PropertyReport::get(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no property named " + name);
}

PropertyReport check_properties(const Expr& f, const PwcFunction& p, const UniGrid& grid,
                                double kappa, std::size_t per_subinterval, double tolerance) {
  if (p.dimension() != 1 || f.dimension() != 1) {
    throw std::invalid_argument("property checks apply to univariate models");
  }
  if (p.size() != grid.n_p) {
    throw std::invalid_argument("model has " + std::to_string(p.size()) + " pieces but the grid has " +
                                std::to_string(grid.n_p) + " subintervals");
  }
  if (p.domain().lower(0) != grid.lower || p.domain().upper(0) != grid.upper) {
    throw std::invalid_argument("model domain differs from the grid");
  }

  // at least 1e4 samples per unit length
  const auto dense = static_cast<std::size_t>(std::ceil(1e4 * grid.delta));
  const std::vector<double> xs = univariate_samples(grid, std::max(per_subinterval, dense));
  std::vector<double> fx(xs.size());
  std::vector<PwcValue> px(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    fx[k] = f(xs[k]);
    px[k] = eval_pwc(p, xs[k]);
  }

  PropertyReport report;
  report.samples_used = xs.size();
  auto finish = [&](PropertyCheck c, double tol) {
    c.passed = c.margin >= -tol;
    report.checks.push_back(std::move(c));
  };

  {
    PropertyCheck c{kP1Concavity, true, std::numeric_limits<double>::infinity(), {}, {}};
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double slack = -p.piece(i).d[0];
      if (slack < c.margin) {
        c.margin = slack;
        c.witness = {grid.midpoint(i)};
        c.piece = i;
      }
    }
    // strict: d must be negative, not merely non-positive
    c.passed = c.margin > 0.0;
    report.checks.push_back(std::move(c));
  }

  {
    PropertyCheck c{kP2Underestimation, true, std::numeric_limits<double>::infinity(), {}, {}};
    const double f_min = *std::min_element(fx.begin(), fx.end());
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double left = grid.node(i);
      const double right = grid.node(i + 1);
      const DiagQuadPiece& piece = p.piece(i);
      const double d = piece.d[0];
      const double vertex = d < 0.0 ? -piece.a[0] / (2.0 * d) : 0.0;
      auto value_at = [&](std::size_t k) { return eval_piece(piece, std::span<const double>(&xs[k], 1)); };
      // Past the vertex the piece only falls, so once f_min - p_i exceeds the
      // best slack so far no further sample in that direction can lower it.
      auto exhausted = [&](double pk, double best) {
        if (!(d < 0.0)) return false;
        const double gap = f_min - pk - best;
        return gap > 8.0 * std::numeric_limits<double>::epsilon() *
                         (std::abs(f_min) + std::abs(pk) + std::abs(best));
      };

      const std::size_t left_end = static_cast<std::size_t>(
          std::upper_bound(xs.begin(), xs.end(), left) - xs.begin());
      const std::size_t right_begin = static_cast<std::size_t>(
          std::lower_bound(xs.begin(), xs.end(), right) - xs.begin());

      double best_left = std::numeric_limits<double>::infinity();
      std::size_t k_left = 0;
      for (std::size_t k = left_end; k-- > 0;) {
        const double pk = value_at(k);
        const double slack = fx[k] - pk;
        if (slack <= best_left) {
          best_left = slack;
          k_left = k;
        }
        if (xs[k] <= vertex && exhausted(pk, std::min(best_left, c.margin))) break;
      }
      double best_right = std::numeric_limits<double>::infinity();
      std::size_t k_right = 0;
      for (std::size_t k = std::max(right_begin, left_end); k < xs.size(); ++k) {
        const double pk = value_at(k);
        const double slack = fx[k] - pk;
        if (slack < best_right) {
          best_right = slack;
          k_right = k;
        }
        if (xs[k] >= vertex && exhausted(pk, std::min({best_left, best_right, c.margin}))) break;
      }

      const bool right_wins = best_right < best_left;
      const double slack = right_wins ? best_right : best_left;
      if (slack < c.margin) {
        c.margin = slack;
        c.witness = {xs[right_wins ? k_right : k_left]};
        c.piece = i;
      }
    }
    finish(std::move(c), tolerance);
  }

  {
    PropertyCheck c{kP3MidpointExactness, true, 0.0, {}, {}};
    for (std::size_t i = 0; i < grid.n_p; ++i) {
      const double m = grid.midpoint(i);
      const double slack = -std::abs(eval_pwc(p, m).value - f(m));
      if (slack < c.margin || c.witness.empty()) {
        c.margin = slack;
        c.witness = {m};
        c.piece = i;
      }
    }
    finish(std::move(c), tolerance);
  }

  {
    PropertyCheck c{kP4Locality, true, std::numeric_limits<double>::infinity(), {}, {}};
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const std::size_t w = px[k].winner;
      const double lo = w == 0 ? -inf : grid.node(w) - 0.5 * grid.delta;
      const double hi = w + 1 == grid.n_p ? inf : grid.node(w + 1) + 0.5 * grid.delta;
      const double slack = std::min(xs[k] - lo, hi - xs[k]);
      if (slack < c.margin) {
        c.margin = slack;
        c.witness = {xs[k]};
        c.piece = w;
      }
    }
    finish(std::move(c), tolerance);
  }

  {
    PropertyCheck c{kSlopeBound, true, std::numeric_limits<double>::infinity(), {}, {}};
    for (std::size_t k = 1; k < xs.size(); ++k) {
      const double slope = std::abs(px[k].value - px[k - 1].value) / (xs[k] - xs[k - 1]);
      const double slack = 4.0 * kappa - slope;
      if (slack < c.margin) {
        c.margin = slack;
        c.witness = {xs[k - 1]};
        c.piece = px[k].winner;
      }
    }
    if (xs.size() < 2) c.margin = 4.0 * kappa;
    finish(std::move(c), kSlopeTolerance);
  }

  {
    PropertyCheck c{kErrorBound, true, std::numeric_limits<double>::infinity(), {}, {}};
    const double bound = 2.5 * kappa * grid.delta;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const double slack = bound - std::abs(fx[k] - px[k].value);
      if (slack < c.margin) {
        c.margin = slack;
        c.witness = {xs[k]};
        c.piece = px[k].winner;
      }
    }
    finish(std::move(c), tolerance);
  }

  return report;
}

TensorGrid univariate_error_grid(const UniGrid& grid, std::size_t density,
                                 std::size_t min_samples) {
  const auto per = std::max<std::size_t>(
      density, (min_samples + grid.n_p - 1) / std::max<std::size_t>(grid.n_p, 1));
  if (static_cast<double>(per) * static_cast<double>(grid.n_p) > static_cast<double>(kMaxErrorSamples)) {
    throw GuardError("error measurement would exceed " + std::to_string(kMaxErrorSamples) +
                     " samples");
  }
  return TensorGrid({univariate_samples(grid, per)});
}

TensorGrid dc_error_grid(const Box& box, std::size_t grid_per_axis, std::size_t density) {
  const std::size_t n = box.dimension();
  const double pieces = std::pow(static_cast<double>(grid_per_axis), static_cast<double>(n));
  const double desired = static_cast<double>((grid_per_axis - 1) * std::max<std::size_t>(density, 1) + 1);
  const double affordable = std::floor(std::pow(kDcEvaluationBudget / pieces, 1.0 / static_cast<double>(n)));
  const auto count = static_cast<std::size_t>(std::max(2.0, std::min(desired, affordable)));

  std::vector<std::vector<double>> axes;
  for (std::size_t j = 0; j < n; ++j) {
    const auto nodes = linspace(box.lower(j), box.upper(j), grid_per_axis);
    axes.push_back(axis_samples(box.lower(j), box.upper(j), count, nodes));
  }
  return TensorGrid(std::move(axes));
}

TensorGrid separable_error_grid(std::span<const UniGrid> grids, std::size_t density,
                                std::size_t min_points_per_axis) {
  std::vector<std::vector<double>> axes;
  for (const auto& g : grids) {
    const auto forced = univariate_samples(g, density);
    axes.push_back(axis_samples(g.lower, g.upper, min_points_per_axis, forced));
  }
  return TensorGrid(std::move(axes));
}

std::vector<StudyRow> convergence_study(const Expr& f, double lower, double upper, double kappa,
                                        std::span<const double> deltas, std::size_t min_samples) {
  if (deltas.empty()) throw std::invalid_argument("convergence study needs at least one width");
  std::vector<StudyRow> rows;
  for (double delta : deltas) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
      throw std::invalid_argument("subinterval widths must be positive");
    }
    const double bound = 2.5 * kappa * delta;
    const UnivariateModel m = build_univariate(f, lower, upper, LipschitzConstant(kappa), bound);
    const ErrorReport r = sup_error(f, m.p, univariate_error_grid(m.grid, 10, min_samples), {}, bound);
    rows.push_back({delta, m.grid.n_p, r.max_abs_error, bound, r.max_abs_error / bound});
  }
  return rows;
}

void write_study_csv(std::ostream& out, std::span<const StudyRow> rows) {
  out << "delta,n_p,max_error,bound,ratio\n";
  for (const auto& r : rows) {
    out << format_double(r.delta) << ',' << r.n_p << ',' << format_double(r.max_error) << ','
        << format_double(r.bound) << ',' << format_double(r.ratio) << '\n';
  }
}

C2Fit fit_c2(const Expr& f, const Box& box, const DcParams& params, std::size_t density,
             std::optional<double> target_eps) {
  const std::size_t n = box.dimension();
  auto plane_count = [n](std::size_t g) {
    return std::pow(static_cast<double>(g), static_cast<double>(n));
  };

  C2Fit fit{build_c2(f, box, params), {}, {params.grid_per_axis}};
  fit.report = sup_error(f, fit.model.p, dc_error_grid(box, params.grid_per_axis, density), {},
                         target_eps);
  if (!target_eps || fit.report.bound_satisfied) return fit;

  auto attempt = [&](std::size_t g) {
    DcParams p = params;
    p.grid_per_axis = g;
    C2Fit next{build_c2(f, box, p), {}, {}};
    next.report = sup_error(f, next.model.p, dc_error_grid(box, g, density), {}, target_eps);
    fit.tried.push_back(g);
    return next;
  };

  // largest grid the guard allows
  auto g_max = static_cast<std::size_t>(
      std::floor(std::pow(static_cast<double>(kMaxTangentPlanes), 1.0 / static_cast<double>(n)) + 1e-9));
  while (plane_count(g_max) > static_cast<double>(kMaxTangentPlanes)) --g_max;

  std::size_t failing = params.grid_per_axis;
  std::optional<C2Fit> passing;
  std::size_t passing_g = 0;
  while (failing < g_max) {
    const std::size_t g = std::min(g_max, 2 * failing - 1);
    C2Fit next = attempt(g);
    if (next.report.bound_satisfied) {
      passing = std::move(next);
      passing_g = g;
      break;
    }
    next.tried = fit.tried;
    fit = std::move(next);
    failing = g;
  }
  if (!passing) return fit;

  while (passing_g - failing > 1) {
    const std::size_t g = failing + (passing_g - failing) / 2;
    C2Fit next = attempt(g);
    if (next.report.bound_satisfied) {
      passing = std::move(next);
      passing_g = g;
    } else {
      failing = g;
    }
  }
  passing->tried = fit.tried;
  return std::move(*passing);
}

}  // namespace pwcc
