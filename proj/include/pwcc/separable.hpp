#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pwcc/core.hpp"
#include "pwcc/expr.hpp"
#include "pwcc/univariate.hpp"

namespace pwcc {

inline constexpr std::size_t kDefaultMaxExpandedPieces = 100'000;

/// Sum of coordinate-wise univariate maxima: value(x) = sum_j p_j(x_j).
class SumForm {
 public:
  /// Component j must be 1-D with domain [lower_j, upper_j] of `domain`.
  SumForm(std::vector<PwcFunction> components, Box domain);

  std::size_t dimension() const noexcept { return domain_.dimension(); }
  const std::vector<PwcFunction>& components() const noexcept { return components_; }
  const PwcFunction& component(std::size_t j) const { return components_.at(j); }
  const Box& domain() const noexcept { return domain_; }

  friend bool operator==(const SumForm&, const SumForm&) = default;

 private:
  std::vector<PwcFunction> components_;
  Box domain_;
};

double eval_sumform(const SumForm& sf, std::span<const double> x);

/// Winning piece index in each component.
std::vector<std::size_t> sumform_winners(const SumForm& sf, std::span<const double> x);

struct SeparableTerm {
  Expr f;  // univariate, in x1
  LipschitzConstant kappa;
};

struct SeparableModel {
  SumForm p;
  std::vector<UniGrid> grids;
  std::vector<double> kappas;
  std::vector<double> eps_split;
  double eps;
};

/// Per-coordinate builds with eps_j = eps / n unless `eps_split` is given
/// (one positive entry per coordinate, summing to at most eps).
SeparableModel build_separable(const std::vector<SeparableTerm>& terms, const Box& box, double eps,
                               std::optional<std::vector<double>> eps_split = std::nullopt);

/// Explicit max-form: one piece per index tuple (i_1..i_n), with the
/// component coefficients concatenated and the offsets summed. Throws
/// GuardError when the product of piece counts exceeds max_pieces.
PwcFunction expand_sumform(const SumForm& sf,
                           std::size_t max_pieces = kDefaultMaxExpandedPieces);

}  // namespace pwcc
