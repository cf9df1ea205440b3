#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pwcc {

/// Raised by parse() on malformed input. `position` is a byte offset into the source.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position);
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Raised during evaluation when an operand leaves its domain (log of a
/// non-positive value, division by zero, ...). `position` points at the
/// offending node in the original source.
class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& message, std::size_t position);
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

enum class NodeKind { kConstant, kVariable, kUnary, kBinary };
enum class UnaryOp { kNeg, kAbs, kSin, kCos, kExp, kLog, kSqrt, kTanh };
enum class BinaryOp { kAdd, kSub, kMul, kDiv, kPow };

struct ExprNode {
  NodeKind kind = NodeKind::kConstant;
  double value = 0.0;          // kConstant
  std::size_t variable = 0;    // kVariable, zero-based
  UnaryOp unary = UnaryOp::kNeg;
  BinaryOp binary = BinaryOp::kAdd;
  int lhs = -1;                // operand of unary, left of binary
  int rhs = -1;
  std::size_t position = 0;    // byte offset in source
};

/// Immutable expression tree over variables x1..xn. Nodes are stored flat;
/// children always precede their parent.
class Expr {
 public:
  Expr(std::vector<ExprNode> nodes, int root, std::size_t dimension);

  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<ExprNode>& nodes() const noexcept { return nodes_; }
  int root() const noexcept { return root_; }

  /// Throws std::invalid_argument on a dimension mismatch, DomainError on
  /// operand domain violations.
  double operator()(std::span<const double> x) const;
  double operator()(double x) const;

  /// Zero-based indices of the variables that actually appear.
  std::vector<std::size_t> referenced_variables() const;

  /// Rewrites a single-variable expression in x_{axis+1} as a univariate
  /// expression in x1. Throws std::invalid_argument if any other variable appears.
  Expr restrict_to_axis(std::size_t axis) const;

 private:
  double eval_node(int index, std::span<const double> x) const;

  std::vector<ExprNode> nodes_;
  int root_;
  std::size_t dimension_;
};

/// Infix grammar, precedence ^ > unary minus > * / > + -, with ^ right
/// associative. Functions: abs sin cos exp log sqrt tanh. Variables x1..xn.
Expr parse(std::string_view source, std::size_t dimension);

/// Fully parenthesised text that parses back to an expression with
/// bit-identical evaluation.
std::string to_string(const Expr& expr);

inline constexpr double kDefaultGradientStep = 1e-5;
inline constexpr double kDefaultHessianStep = 1e-3;

using ScalarField = std::function<double(std::span<const double>)>;

/// Central differences, one pair of evaluations per coordinate.
std::vector<double> gradient_fd(const ScalarField& f, std::span<const double> x,
                                double h = kDefaultGradientStep);
std::vector<double> gradient_fd(const Expr& f, std::span<const double> x,
                                double h = kDefaultGradientStep);

/// Row-major n x n matrix from the second-order central stencil,
/// symmetrised as (H + H^T) / 2.
std::vector<double> hessian_fd(const ScalarField& f, std::span<const double> x,
                               double h = kDefaultHessianStep);
std::vector<double> hessian_fd(const Expr& f, std::span<const double> x,
                               double h = kDefaultHessianStep);

}  // namespace pwcc
