#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pwcc/core.hpp"
#include "pwcc/expr.hpp"
#include "pwcc/univariate.hpp"

namespace pwcc {

inline constexpr std::size_t kMaxDcDimension = 6;
inline constexpr std::size_t kMaxTangentPlanes = 1'000'000;

/// Eigenvalues of a symmetric row-major n x n matrix by cyclic Jacobi
/// rotations, ascending. Sweeps until the off-diagonal Frobenius norm drops
/// below 1e-12 times the norm of the input. Rejects non-symmetric input.
std::vector<double> symmetric_eigenvalues(std::span<const double> matrix, std::size_t n);
double min_eigenvalue(std::span<const double> matrix, std::size_t n);

struct MuEstimate {
  double mu;
  double min_hessian_eigenvalue;   // smallest sampled value
  std::vector<double> argmin;      // where it was sampled
  std::size_t samples;
};

/// Sampling heuristic for the convexifying shift: evaluates the finite
/// difference Hessian on a uniform grid plus the cell midpoints and returns
/// safety * max(0, -lambda_min / 2). Not a rigorous bound.
MuEstimate estimate_mu(const Expr& f, const Box& box, std::size_t samples_per_axis,
                       double safety, double hessian_step = kDefaultHessianStep);

struct TangentPlane {
  std::vector<double> a;
  double b = 0.0;
};

struct DcParams {
  double mu = 0.0;
  std::size_t grid_per_axis = 11;
  double gradient_step = kDefaultGradientStep;
  double hessian_step = kDefaultHessianStep;
};

/// f(x) + mu * ||x||^2
double convexified_value(const Expr& f, double mu, std::span<const double> x);

/// Tangent planes of f + mu ||x||^2 at every node of the uniform
/// grid_per_axis^n grid over the box, in lexicographic node order.
std::vector<TangentPlane> build_tangent_planes(const Expr& f, double mu, const Box& box,
                                               std::size_t grid_per_axis,
                                               double gradient_step = kDefaultGradientStep);

struct DcModel {
  PwcFunction p;
  DcParams params;
};

/// Pieces -mu ||x||^2 + a_i^T x + b_i, one per tangent plane.
DcModel build_c2(const Expr& f, const Box& box, const DcParams& params);

}  // namespace pwcc
