#include "pwcc/dc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pwcc/tensor_grid.hpp"

namespace pwcc {

namespace {

constexpr int kMaxJacobiSweeps = 100;

double off_diagonal_norm(const std::vector<double>& m, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) s += m[i * n + j] * m[i * n + j];
    }
  }
  return std::sqrt(s);
}

void check_dimension(const Box& box) {
  if (box.dimension() > kMaxDcDimension) {
    throw GuardError("tensor grids are limited to " + std::to_string(kMaxDcDimension) +
                     " dimensions, got " + std::to_string(box.dimension()));
  }
}

}  // namespace

std::vector<double> symmetric_eigenvalues(std::span<const double> matrix, std::size_t n) {
  if (n == 0 || matrix.size() != n * n) throw std::invalid_argument("matrix is not n x n");
  double norm = 0.0;
  for (double v : matrix) norm += v * v;
  norm = std::sqrt(norm);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(matrix[i * n + j] - matrix[j * n + i]) > 1e-12 * std::max(norm, 1.0)) {
        throw std::invalid_argument("matrix is not symmetric");
      }
    }
  }

  std::vector<double> m(matrix.begin(), matrix.end());
  const double tol = 1e-12 * norm;
  for (int sweep = 0; sweep < kMaxJacobiSweeps && off_diagonal_norm(m, n) > tol; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m[p * n + q];
        if (apq == 0.0) continue;
        const double app = m[p * n + p];
        const double aqq = m[q * n + q];
        // rotation angle that annihilates m[p][q]
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double mkp = m[k * n + p];
          const double mkq = m[k * n + q];
          m[k * n + p] = c * mkp - s * mkq;
          m[k * n + q] = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double mpk = m[p * n + k];
          const double mqk = m[q * n + k];
          m[p * n + k] = c * mpk - s * mqk;
          m[q * n + k] = s * mpk + c * mqk;
        }
        m[p * n + q] = 0.0;
        m[q * n + p] = 0.0;
      }
    }
  }

  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = m[i * n + i];
  std::sort(eig.begin(), eig.end());
  return eig;
}

double min_eigenvalue(std::span<const double> matrix, std::size_t n) {
  return symmetric_eigenvalues(matrix, n).front();
}

MuEstimate estimate_mu(const Expr& f, const Box& box, std::size_t samples_per_axis,
                       double safety, double hessian_step) {
  if (samples_per_axis < 2) throw std::invalid_argument("need at least two samples per axis");
  if (!(safety >= 1.0)) throw std::invalid_argument("safety factor must be >= 1");
  if (f.dimension() != box.dimension()) {
    throw std::invalid_argument("function and box dimensions differ");
  }
  check_dimension(box);

  const std::size_t n = box.dimension();
  std::vector<std::vector<double>> nodes;
  std::vector<std::vector<double>> mids;
  for (std::size_t j = 0; j < n; ++j) {
    nodes.push_back(linspace(box.lower(j), box.upper(j), samples_per_axis));
    std::vector<double> m;
    for (std::size_t k = 0; k + 1 < nodes[j].size(); ++k) {
      m.push_back(0.5 * (nodes[j][k] + nodes[j][k + 1]));
    }
    mids.push_back(std::move(m));
  }

  MuEstimate result{0.0, 0.0, {}, 0};
  bool first = true;
  std::vector<double> x;
  for (const TensorGrid& grid : {TensorGrid(nodes), TensorGrid(mids)}) {
    if (grid.size() > kMaxTangentPlanes) throw GuardError("too many curvature samples");
    for (std::size_t k = 0; k < grid.size(); ++k) {
      grid.point(k, x);
      const double lambda = min_eigenvalue(hessian_fd(f, x, hessian_step), n);
      if (first || lambda < result.min_hessian_eigenvalue) {
        result.min_hessian_eigenvalue = lambda;
        result.argmin = x;
        first = false;
      }
      ++result.samples;
    }
  }
  result.mu = safety * std::max(0.0, -0.5 * result.min_hessian_eigenvalue);
  return result;
}

double convexified_value(const Expr& f, double mu, std::span<const double> x) {
  double sq = 0.0;
  for (double v : x) sq += v * v;
  return f(x) + mu * sq;
}

std::vector<TangentPlane> build_tangent_planes(const Expr& f, double mu, const Box& box,
                                               std::size_t grid_per_axis, double gradient_step) {
  if (grid_per_axis < 2) throw std::invalid_argument("grid_per_axis must be at least 2");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("mu must be >= 0");
  if (f.dimension() != box.dimension()) {
    throw std::invalid_argument("function and box dimensions differ");
  }
  check_dimension(box);
  const TensorGrid grid = TensorGrid::uniform(box, grid_per_axis);
  if (grid.size() > kMaxTangentPlanes) {
    throw GuardError(std::to_string(grid_per_axis) + "^" + std::to_string(box.dimension()) +
                     " tangent planes exceeds the limit of " + std::to_string(kMaxTangentPlanes));
  }

  const ScalarField f_cvx = [&f, mu](std::span<const double> p) {
    return convexified_value(f, mu, p);
  };
  std::vector<TangentPlane> planes;
  planes.reserve(grid.size());
  std::vector<double> x;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    grid.point(k, x);
    TangentPlane plane;
    plane.a = gradient_fd(f_cvx, x, gradient_step);
    double ax = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) ax += plane.a[j] * x[j];
    plane.b = f_cvx(x) - ax;
    planes.push_back(std::move(plane));
  }
  return planes;
}

DcModel build_c2(const Expr& f, const Box& box, const DcParams& params) {
  auto planes = build_tangent_planes(f, params.mu, box, params.grid_per_axis, params.gradient_step);
  std::vector<DiagQuadPiece> pieces;
  pieces.reserve(planes.size());
  const std::vector<double> curvature(box.dimension(), -params.mu);
  for (auto& plane : planes) {
    pieces.push_back(DiagQuadPiece{curvature, std::move(plane.a), plane.b});
  }
  return {PwcFunction(std::move(pieces), box), params};
}

}  // namespace pwcc
