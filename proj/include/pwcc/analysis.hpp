#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pwcc/core.hpp"
#include "pwcc/dc.hpp"
#include "pwcc/expr.hpp"
#include "pwcc/separable.hpp"
#include "pwcc/tensor_grid.hpp"
#include "pwcc/univariate.hpp"

namespace pwcc {

inline constexpr double kDefaultSafety = 1.1;
inline constexpr double kPropertyTolerance = 1e-9;
inline constexpr double kSlopeTolerance = 1e-6;
inline constexpr std::size_t kMaxErrorSamples = 50'000'000;

// ---------------------------------------------------------------------------
// Lipschitz estimation

/// safety * (largest difference quotient between consecutive points of a
/// uniform grid with ceil(samples_per_unit * width) cells). Heuristic: the
/// sampled quotients approach the true modulus from below. A function with no
/// sampled variation gets the floor 1e-12 * safety.
double estimate_lipschitz(const Expr& f, double lower, double upper,
                          std::size_t samples_per_unit, double safety = kDefaultSafety);

/// Cone under v_mid with apex at center: v_mid - kappa |x - center|.
double sawtooth_value(double v_mid, double center, double kappa, double x);

// ---------------------------------------------------------------------------
// Sample sets

/// Sorted union of `count` evenly spaced coordinates on [lower, upper] and
/// the forced coordinates; values closer than 1e-12 (relative) to a forced
/// coordinate are dropped in its favour.
std::vector<double> axis_samples(double lower, double upper, std::size_t count,
                                 std::span<const double> forced = {});

/// Every node and midpoint of the grid plus `per_subinterval` evenly spaced
/// points inside each subinterval.
std::vector<double> univariate_samples(const UniGrid& grid, std::size_t per_subinterval);

/// Points drawn uniformly from the box with a 64-bit Mersenne twister.
std::vector<std::vector<double>> random_points(const Box& box, std::size_t count,
                                               std::uint64_t seed);

// ---------------------------------------------------------------------------
// Sup-norm error

struct ErrorReport {
  double max_abs_error = 0.0;
  std::vector<double> argmax_point;
  std::size_t samples_used = 0;
  std::optional<double> bound;
  bool bound_satisfied = true;
};

/// Maximum of |f - p| over the tensor grid and the extra points. Ties keep
/// the lexicographically smallest point.
ErrorReport sup_error(const ScalarField& f, const ScalarField& p, const TensorGrid& samples,
                      std::span<const std::vector<double>> extra = {},
                      std::optional<double> bound = std::nullopt);
ErrorReport sup_error(const Expr& f, const PwcFunction& p, const TensorGrid& samples,
                      std::span<const std::vector<double>> extra = {},
                      std::optional<double> bound = std::nullopt);
/// Component values are cached per axis coordinate; the sum is formed in the
/// same order as eval_sumform, so results are identical.
ErrorReport sup_error(const Expr& f, const SumForm& p, const TensorGrid& samples,
                      std::span<const std::vector<double>> extra = {},
                      std::optional<double> bound = std::nullopt);

/// {"max_abs_error":..,"argmax":[..],"bound":..,"pass":..}
std::string report_json(const ErrorReport& r);

// ---------------------------------------------------------------------------
// Structural properties of univariate builds

struct PropertyCheck {
  std::string name;
  bool passed = true;
  /// Worst-case slack of the inequality being checked (negative = violated).
  double margin = 0.0;
  std::vector<double> witness;          // point attaining the worst margin
  std::optional<std::size_t> piece;     // piece involved, when meaningful
};

struct PropertyReport {
  std::vector<PropertyCheck> checks;
  std::size_t samples_used = 0;

  bool all_passed() const;
  const PropertyCheck& get(const std::string& name) const;
};

inline constexpr const char* kP1Concavity = "P1 concavity";
inline constexpr const char* kP2Underestimation = "P2 underestimation";
inline constexpr const char* kP3MidpointExactness = "P3 midpoint exactness";
inline constexpr const char* kP4Locality = "P4 locality";
inline constexpr const char* kSlopeBound = "slope bound";
inline constexpr const char* kErrorBound = "error bound";

/// Checks a univariate build against its grid: concave pieces, each piece
/// below f outside its own subinterval, p == f at every midpoint, winners
/// confined to their windows, adjacent-sample slopes of p within 4 kappa, and
/// |f - p| within 2.5 kappa delta. Samples at least 1e4 points per unit
/// length. Throws std::invalid_argument if p and grid disagree.
PropertyReport check_properties(const Expr& f, const PwcFunction& p, const UniGrid& grid,
                                double kappa, std::size_t per_subinterval = 10,
                                double tolerance = kPropertyTolerance);

// ---------------------------------------------------------------------------
// Convergence

struct StudyRow {
  double delta;      // requested width
  std::size_t n_p;
  double max_error;
  double bound;      // 2.5 kappa delta
  double ratio;      // max_error / bound
};

/// One build per requested width (eps = 2.5 kappa delta), each measured on at
/// least `min_samples` points.
std::vector<StudyRow> convergence_study(const Expr& f, double lower, double upper, double kappa,
                                        std::span<const double> deltas,
                                        std::size_t min_samples = 100'000);

void write_study_csv(std::ostream& out, std::span<const StudyRow> rows);

// ---------------------------------------------------------------------------
// Error measurement for the builders

/// Sample set for a univariate build: at least `density` per subinterval and
/// at least `min_samples` in total.
TensorGrid univariate_error_grid(const UniGrid& grid, std::size_t density,
                                 std::size_t min_samples = 100'000);

/// Tensor sample set for a tangent-plane build: `density` points per grid
/// cell on each axis, grid nodes included.
TensorGrid dc_error_grid(const Box& box, std::size_t grid_per_axis, std::size_t density);

/// Per-axis union of the component grids' univariate samples.
TensorGrid separable_error_grid(std::span<const UniGrid> grids, std::size_t density,
                                std::size_t min_points_per_axis = 300);

struct C2Fit {
  DcModel model;
  ErrorReport report;
  std::vector<std::size_t> tried;  // grid sizes evaluated, in order
};

/// Builds with params.grid_per_axis and, when target_eps is set, grows the
/// grid (doubling, then bisection) to the smallest size whose sampled error
/// is within target_eps, stopping at the tangent-plane guard.
C2Fit fit_c2(const Expr& f, const Box& box, const DcParams& params, std::size_t density,
             std::optional<double> target_eps = std::nullopt);

}  // namespace pwcc
