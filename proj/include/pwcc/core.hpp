#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace pwcc {

/// Axis-aligned box with nonempty interior: lower[j] < upper[j] for every j.
class Box {
 public:
  Box(std::vector<double> lower, std::vector<double> upper);

  std::size_t dimension() const noexcept { return lower_.size(); }
  const std::vector<double>& lower() const noexcept { return lower_; }
  const std::vector<double>& upper() const noexcept { return upper_; }
  double lower(std::size_t j) const { return lower_.at(j); }
  double upper(std::size_t j) const { return upper_.at(j); }
  double width(std::size_t j) const { return upper_.at(j) - lower_.at(j); }

  bool contains(std::span<const double> x) const;
  /// The 1-D box [lower_j, upper_j].
  Box axis(std::size_t j) const;

  friend bool operator==(const Box&, const Box&) = default;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

/// One concave piece: sum_j d_j x_j^2 + sum_j a_j x_j + b with every d_j <= 0.
struct DiagQuadPiece {
  std::vector<double> d;
  std::vector<double> a;
  double b = 0.0;

  std::size_t dimension() const noexcept { return a.size(); }
  friend bool operator==(const DiagQuadPiece&, const DiagQuadPiece&) = default;
};

/// Empty when the piece is well formed, otherwise a description of the first
/// violated invariant ("concavity violated", length mismatch, non-finite value).
std::string validate_piece(const DiagQuadPiece& piece);

/// Evaluates the piece as written. Throws std::invalid_argument on a dimension mismatch.
double eval_piece(const DiagQuadPiece& piece, std::span<const double> x);

struct PwcValue {
  double value;
  std::size_t winner;  // smallest index attaining the max
};

/// Pointwise maximum of a nonempty list of concave pieces over a box.
class PwcFunction {
 public:
  /// Throws std::invalid_argument if the list is empty, any piece is invalid,
  /// or dimensions disagree.
  PwcFunction(std::vector<DiagQuadPiece> pieces, Box domain);

  std::size_t dimension() const noexcept { return domain_.dimension(); }
  std::size_t size() const noexcept { return pieces_.size(); }
  const std::vector<DiagQuadPiece>& pieces() const noexcept { return pieces_; }
  const DiagQuadPiece& piece(std::size_t i) const { return pieces_.at(i); }
  const Box& domain() const noexcept { return domain_; }

  friend bool operator==(const PwcFunction&, const PwcFunction&) = default;

 private:
  std::vector<DiagQuadPiece> pieces_;
  Box domain_;
};

/// Global evaluation; x does not have to lie in the domain.
PwcValue eval_pwc(const PwcFunction& f, std::span<const double> x);
inline PwcValue eval_pwc(const PwcFunction& f, double x) {
  return eval_pwc(f, std::span<const double>(&x, 1));
}

}  // namespace pwcc
