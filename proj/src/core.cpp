#include "pwcc/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace pwcc {

Box::Box(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty()) throw std::invalid_argument("box must have at least one dimension");
  if (lower_.size() != upper_.size()) {
    throw std::invalid_argument("box bounds have different lengths");
  }
  for (std::size_t j = 0; j < lower_.size(); ++j) {
    if (!std::isfinite(lower_[j]) || !std::isfinite(upper_[j]) || !(lower_[j] < upper_[j])) {
      throw std::invalid_argument("box bound " + std::to_string(j + 1) +
                                  " is not a finite interval with lower < upper");
    }
  }
}

bool Box::contains(std::span<const double> x) const {
  if (x.size() != dimension()) return false;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] < lower_[j] || x[j] > upper_[j]) return false;
  }
  return true;
}

Box Box::axis(std::size_t j) const { return Box({lower_.at(j)}, {upper_.at(j)}); }

std::string validate_piece(const DiagQuadPiece& piece) {
  if (piece.a.empty()) return "piece has zero dimension";
  if (piece.d.size() != piece.a.size()) return "piece has mismatched d and a lengths";
  for (std::size_t j = 0; j < piece.d.size(); ++j) {
    if (!std::isfinite(piece.d[j]) || !std::isfinite(piece.a[j])) return "non-finite coefficient";
    if (piece.d[j] > 0.0) return "concavity violated: d[" + std::to_string(j) + "] > 0";
  }
  if (!std::isfinite(piece.b)) return "non-finite coefficient";
  return {};
}

namespace {

// Error-free transformations: a + b = s + e and a * b = p + e exactly.
struct Split {
  double hi;
  double lo;
};

inline Split two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline Split split(double a) {
  constexpr double kFactor = 134217729.0;  // 2^27 + 1
  const double c = kFactor * a;
  const double hi = c - (c - a);
  return {hi, a - hi};
}

inline Split two_product(double a, double b) {
  const double p = a * b;
  const Split as = split(a);
  const Split bs = split(b);
  const double e = ((as.hi * bs.hi - p) + as.hi * bs.lo + as.lo * bs.hi) + as.lo * bs.lo;
  return {p, e};
}

// Compensated accumulation; the result is as accurate as if computed in
// roughly twice the working precision and then rounded.
class Accumulator {
 public:
  void add(double v) {
    const Split t = two_sum(sum_, v);
    sum_ = t.hi;
    err_ += t.lo;
  }
  void add_product(double a, double b) {
    const Split t = two_product(a, b);
    add(t.hi);
    err_ += t.lo;
  }
  void add_product(double a, double b, double c) {
    const Split ab = two_product(a, b);
    const Split abc = two_product(ab.hi, c);
    add(abc.hi);
    err_ += abc.lo + ab.lo * c;
  }
  double value() const { return sum_ + err_; }

 private:
  double sum_ = 0.0;
  double err_ = 0.0;
};

}  // namespace

double eval_piece(const DiagQuadPiece& piece, std::span<const double> x) {
  if (x.size() != piece.dimension()) {
    throw std::invalid_argument("point has dimension " + std::to_string(x.size()) +
                                ", piece expects " + std::to_string(piece.dimension()));
  }
  // The quadratic and constant terms cancel heavily for narrow pieces far
  // from the origin, so the sum is accumulated with compensation.
  Accumulator acc;
  for (std::size_t j = 0; j < x.size(); ++j) {
    acc.add_product(piece.d[j], x[j], x[j]);
    acc.add_product(piece.a[j], x[j]);
  }
  acc.add(piece.b);
  return acc.value();
}

PwcFunction::PwcFunction(std::vector<DiagQuadPiece> pieces, Box domain)
    : pieces_(std::move(pieces)), domain_(std::move(domain)) {
  if (pieces_.empty()) throw std::invalid_argument("piecewise-concave function needs a piece");
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (auto problem = validate_piece(pieces_[i]); !problem.empty()) {
      throw std::invalid_argument("piece " + std::to_string(i) + ": " + problem);
    }
    if (pieces_[i].dimension() != domain_.dimension()) {
      throw std::invalid_argument("piece " + std::to_string(i) + " dimension differs from domain");
    }
  }
}

namespace {

// Plain evaluation of a piece and a bound on its distance from eval_piece.
struct Estimate {
  double value;
  double radius;
};

inline Estimate estimate_piece(const DiagQuadPiece& piece, std::span<const double> x) {
  double sum = piece.b;
  double magnitude = std::abs(piece.b);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double q = piece.d[j] * x[j] * x[j];
    const double l = piece.a[j] * x[j];
    sum += q + l;
    magnitude += std::abs(q) + std::abs(l);
  }
  const double ops = 4.0 * static_cast<double>(x.size()) + 4.0;
  return {sum, ops * std::numeric_limits<double>::epsilon() * magnitude +
                   std::numeric_limits<double>::min()};
}

}  // namespace

PwcValue eval_pwc(const PwcFunction& f, std::span<const double> x) {
  if (x.size() != f.dimension()) {
    throw std::invalid_argument("point has dimension " + std::to_string(x.size()) +
                                ", model expects " + std::to_string(f.dimension()));
  }
  const auto& pieces = f.pieces();
  // Only pieces whose plain estimate can reach the best lower bound are
  // evaluated with compensation; the result equals the exhaustive max.
  double floor = -std::numeric_limits<double>::infinity();
  for (const auto& piece : pieces) {
    const Estimate e = estimate_piece(piece, x);
    floor = std::max(floor, e.value - e.radius);
  }
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  PwcValue best{-std::numeric_limits<double>::infinity(), kNone};
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const Estimate e = estimate_piece(pieces[i], x);
    if (!(e.value + e.radius >= floor)) continue;
    const double v = eval_piece(pieces[i], x);
    if (best.winner == kNone || v > best.value) best = {v, i};
  }
  if (best.winner != kNone) return best;

  // non-finite input: fall back to the exhaustive scan
  best = {eval_piece(pieces.front(), x), 0};
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    const double v = eval_piece(pieces[i], x);
    if (v > best.value) best = {v, i};
  }
  return best;
}

}  // namespace pwcc
