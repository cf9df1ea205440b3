#include "pwcc/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <utility>

namespace pwcc {

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::runtime_error(message + " at position " + std::to_string(position)),
      position_(position) {}

DomainError::DomainError(const std::string& message, std::size_t position)
    : std::runtime_error(message + " (expression position " + std::to_string(position) + ")"),
      position_(position) {}

namespace {

struct FunctionName {
  std::string_view name;
  UnaryOp op;
};

constexpr std::array<FunctionName, 7> kFunctions{{
    {"abs", UnaryOp::kAbs},
    {"sin", UnaryOp::kSin},
    {"cos", UnaryOp::kCos},
    {"exp", UnaryOp::kExp},
    {"log", UnaryOp::kLog},
    {"sqrt", UnaryOp::kSqrt},
    {"tanh", UnaryOp::kTanh},
}};

std::string_view unary_name(UnaryOp op) {
  if (op == UnaryOp::kNeg) return "-";
  for (const auto& f : kFunctions) {
    if (f.op == op) return f.name;
  }
  return "?";
}

char binary_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::kAdd: return '+';
    case BinaryOp::kSub: return '-';
    case BinaryOp::kMul: return '*';
    case BinaryOp::kDiv: return '/';
    case BinaryOp::kPow: return '^';
  }
  return '?';
}

// Recursive descent over the grammar
//   sum     := product (('+' | '-') product)*
//   product := signed (('*' | '/') signed)*
//   signed  := ('-' | '+') signed | power
//   power   := primary ('^' signed)?
//   primary := number | variable | function '(' sum ')' | '(' sum ')'
class Parser {
 public:
  Parser(std::string_view source, std::size_t dimension)
      : source_(source), dimension_(dimension) {}

  Expr run() {
    if (dimension_ == 0) throw ParseError("dimension must be positive", 0);
    int root = parse_sum();
    skip_space();
    if (pos_ != source_.size()) {
      throw ParseError(std::string("unexpected '") + source_[pos_] + "'", pos_);
    }
    return Expr(std::move(nodes_), root, dimension_);
  }

 private:
  void skip_space() {
    while (pos_ < source_.size() && std::isspace(static_cast<unsigned char>(source_[pos_]))) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < source_.size() && source_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  int push(ExprNode node) {
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size()) - 1;
  }

  int make_binary(BinaryOp op, int lhs, int rhs, std::size_t at) {
    ExprNode n;
    n.kind = NodeKind::kBinary;
    n.binary = op;
    n.lhs = lhs;
    n.rhs = rhs;
    n.position = at;
    return push(n);
  }

  int make_unary(UnaryOp op, int operand, std::size_t at) {
    ExprNode n;
    n.kind = NodeKind::kUnary;
    n.unary = op;
    n.lhs = operand;
    n.position = at;
    return push(n);
  }

  int parse_sum() {
    int lhs = parse_product();
    for (;;) {
      skip_space();
      std::size_t at = pos_;
      if (accept('+')) {
        lhs = make_binary(BinaryOp::kAdd, lhs, parse_product(), at);
      } else if (accept('-')) {
        lhs = make_binary(BinaryOp::kSub, lhs, parse_product(), at);
      } else {
        return lhs;
      }
    }
  }

  int parse_product() {
    int lhs = parse_signed();
    for (;;) {
      skip_space();
      std::size_t at = pos_;
      if (accept('*')) {
        lhs = make_binary(BinaryOp::kMul, lhs, parse_signed(), at);
      } else if (accept('/')) {
        lhs = make_binary(BinaryOp::kDiv, lhs, parse_signed(), at);
      } else {
        return lhs;
      }
    }
  }

  int parse_signed() {
    skip_space();
    std::size_t at = pos_;
    if (accept('-')) return make_unary(UnaryOp::kNeg, parse_signed(), at);
    if (accept('+')) return parse_signed();
    return parse_power();
  }

  int parse_power() {
    int base = parse_primary();
    skip_space();
    std::size_t at = pos_;
    if (accept('^')) return make_binary(BinaryOp::kPow, base, parse_signed(), at);
    return base;
  }

  int parse_primary() {
    skip_space();
    if (pos_ >= source_.size()) throw ParseError("expected an operand, found end of input", pos_);
    const std::size_t at = pos_;
    const char c = source_[pos_];

    if (c == '(') {
      ++pos_;
      int inner = parse_sum();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < source_.size() && std::isalnum(static_cast<unsigned char>(source_[end]))) ++end;
      std::string_view word = source_.substr(pos_, end - pos_);

      for (const auto& f : kFunctions) {
        if (word == f.name) {
          pos_ = end;
          if (!accept('(')) throw ParseError("expected '(' after " + std::string(word), pos_);
          int arg = parse_sum();
          if (!accept(')')) throw ParseError("expected ')'", pos_);
          return make_unary(f.op, arg, at);
        }
      }
      if (word.size() >= 2 && word[0] == 'x' &&
          word.find_first_not_of("0123456789", 1) == std::string_view::npos) {
        std::size_t index = 0;
        auto [ptr, ec] = std::from_chars(word.data() + 1, word.data() + word.size(), index);
        if (ec != std::errc{} || index == 0 || index > dimension_) {
          throw ParseError("variable " + std::string(word) + " outside x1..x" +
                               std::to_string(dimension_),
                           at);
        }
        pos_ = end;
        ExprNode n;
        n.kind = NodeKind::kVariable;
        n.variable = index - 1;
        n.position = at;
        return push(n);
      }
      throw ParseError("unknown identifier '" + std::string(word) + "'", at);
    }
    throw ParseError(std::string("unexpected '") + c + "'", at);
  }

  int parse_number() {
    const std::size_t at = pos_;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(source_.data() + pos_, source_.data() + source_.size(), value,
                                     std::chars_format::general);
    if (ec == std::errc::result_out_of_range) throw ParseError("numeric literal out of range", at);
    if (ec != std::errc{}) throw ParseError("malformed number", at);
    pos_ = static_cast<std::size_t>(ptr - source_.data());
    ExprNode n;
    n.kind = NodeKind::kConstant;
    n.value = value;
    n.position = at;
    return push(n);
  }

  std::string_view source_;
  std::size_t dimension_;
  std::size_t pos_ = 0;
  std::vector<ExprNode> nodes_;
};

bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v; }

void print_node(const Expr& e, int index, std::string& out) {
  const ExprNode& n = e.nodes()[static_cast<std::size_t>(index)];
  switch (n.kind) {
    case NodeKind::kConstant: {
      std::array<char, 64> buf{};
      auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), n.value);
      std::string_view text(buf.data(), static_cast<std::size_t>(ptr - buf.data()));
      if (n.value < 0 || std::signbit(n.value)) {
        out += "(-";
        out += text.substr(1);
        out += ')';
      } else {
        out += text;
      }
      return;
    }
    case NodeKind::kVariable:
      out += 'x';
      out += std::to_string(n.variable + 1);
      return;
    case NodeKind::kUnary:
      if (n.unary == UnaryOp::kNeg) {
        out += "(-";
        print_node(e, n.lhs, out);
        out += ')';
      } else {
        out += unary_name(n.unary);
        out += '(';
        print_node(e, n.lhs, out);
        out += ')';
      }
      return;
    case NodeKind::kBinary:
      out += '(';
      print_node(e, n.lhs, out);
      out += binary_symbol(n.binary);
      print_node(e, n.rhs, out);
      out += ')';
      return;
  }
}

}  // namespace

Expr::Expr(std::vector<ExprNode> nodes, int root, std::size_t dimension)
    : nodes_(std::move(nodes)), root_(root), dimension_(dimension) {
  if (nodes_.empty() || root_ < 0 || static_cast<std::size_t>(root_) >= nodes_.size()) {
    throw std::invalid_argument("expression has no root node");
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const ExprNode& n = nodes_[i];
    if (n.kind == NodeKind::kVariable && n.variable >= dimension_) {
      throw std::invalid_argument("variable index exceeds expression dimension");
    }
    // children precede parents, so the tree is finite
    const bool needs_lhs = n.kind == NodeKind::kUnary || n.kind == NodeKind::kBinary;
    if (needs_lhs && (n.lhs < 0 || static_cast<std::size_t>(n.lhs) >= i)) {
      throw std::invalid_argument("malformed expression node order");
    }
    if (n.kind == NodeKind::kBinary && (n.rhs < 0 || static_cast<std::size_t>(n.rhs) >= i)) {
      throw std::invalid_argument("malformed expression node order");
    }
  }
}

double Expr::operator()(std::span<const double> x) const {
  if (x.size() != dimension_) {
    throw std::invalid_argument("point has dimension " + std::to_string(x.size()) +
                                ", expression expects " + std::to_string(dimension_));
  }
  return eval_node(root_, x);
}

double Expr::operator()(double x) const { return (*this)(std::span<const double>(&x, 1)); }

double Expr::eval_node(int index, std::span<const double> x) const {
  const ExprNode& n = nodes_[static_cast<std::size_t>(index)];
  switch (n.kind) {
    case NodeKind::kConstant:
      return n.value;
    case NodeKind::kVariable:
      return x[n.variable];
    case NodeKind::kUnary: {
      const double v = eval_node(n.lhs, x);
      switch (n.unary) {
        case UnaryOp::kNeg: return -v;
        case UnaryOp::kAbs: return std::abs(v);
        case UnaryOp::kSin: return std::sin(v);
        case UnaryOp::kCos: return std::cos(v);
        case UnaryOp::kExp: return std::exp(v);
        case UnaryOp::kTanh: return std::tanh(v);
        case UnaryOp::kLog:
          if (!(v > 0.0)) throw DomainError("log of non-positive value", n.position);
          return std::log(v);
        case UnaryOp::kSqrt:
          if (v < 0.0) throw DomainError("sqrt of negative value", n.position);
          return std::sqrt(v);
      }
      break;
    }
    case NodeKind::kBinary: {
      const double l = eval_node(n.lhs, x);
      const double r = eval_node(n.rhs, x);
      switch (n.binary) {
        case BinaryOp::kAdd: return l + r;
        case BinaryOp::kSub: return l - r;
        case BinaryOp::kMul: return l * r;
        case BinaryOp::kDiv:
          if (r == 0.0) throw DomainError("division by zero", n.position);
          return l / r;
        case BinaryOp::kPow:
          if (l < 0.0 && !is_integer(r)) {
            throw DomainError("negative base with non-integer exponent", n.position);
          }
          if (l == 0.0 && r < 0.0) throw DomainError("zero raised to a negative power", n.position);
          return std::pow(l, r);
      }
      break;
    }
  }
  throw std::logic_error("corrupt expression node");
}

std::vector<std::size_t> Expr::referenced_variables() const {
  std::set<std::size_t> seen;
  for (const auto& n : nodes_) {
    if (n.kind == NodeKind::kVariable) seen.insert(n.variable);
  }
  return {seen.begin(), seen.end()};
}

Expr Expr::restrict_to_axis(std::size_t axis) const {
  std::vector<ExprNode> copy = nodes_;
  for (auto& n : copy) {
    if (n.kind != NodeKind::kVariable) continue;
    if (n.variable != axis) {
      throw std::invalid_argument("expression for coordinate x" + std::to_string(axis + 1) +
                                  " references x" + std::to_string(n.variable + 1));
    }
    n.variable = 0;
  }
  return Expr(std::move(copy), root_, 1);
}

Expr parse(std::string_view source, std::size_t dimension) {
  return Parser(source, dimension).run();
}

std::string to_string(const Expr& expr) {
  std::string out;
  print_node(expr, expr.root(), out);
  return out;
}

std::vector<double> gradient_fd(const ScalarField& f, std::span<const double> x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  std::vector<double> point(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    point[j] = x[j] + h;
    const double up = f(point);
    point[j] = x[j] - h;
    const double down = f(point);
    point[j] = x[j];
    grad[j] = (up - down) / (2.0 * h);
  }
  return grad;
}

std::vector<double> gradient_fd(const Expr& f, std::span<const double> x, double h) {
  return gradient_fd(ScalarField([&f](std::span<const double> p) { return f(p); }), x, h);
}

std::vector<double> hessian_fd(const ScalarField& f, std::span<const double> x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  const std::size_t n = x.size();
  std::vector<double> point(x.begin(), x.end());
  std::vector<double> raw(n * n, 0.0);
  const double center = f(point);

  auto shifted = [&](std::size_t i, double si, std::size_t j, double sj) {
    point[i] += si;
    point[j] += sj;
    const double v = f(point);
    point[i] = x[i];
    point[j] = x[j];
    return v;
  };

  for (std::size_t i = 0; i < n; ++i) {
    point[i] = x[i] + h;
    const double up = f(point);
    point[i] = x[i] - h;
    const double down = f(point);
    point[i] = x[i];
    raw[i * n + i] = (up - 2.0 * center + down) / (h * h);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double pp = shifted(i, h, j, h);
      const double pm = shifted(i, h, j, -h);
      const double mp = shifted(i, -h, j, h);
      const double mm = shifted(i, -h, j, -h);
      raw[i * n + j] = (pp - pm - mp + mm) / (4.0 * h * h);
      raw[j * n + i] = raw[i * n + j];
    }
  }

  std::vector<double> sym(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) sym[i * n + j] = 0.5 * (raw[i * n + j] + raw[j * n + i]);
  }
  return sym;
}

std::vector<double> hessian_fd(const Expr& f, std::span<const double> x, double h) {
  return hessian_fd(ScalarField([&f](std::span<const double> p) { return f(p); }), x, h);
}

}  // namespace pwcc
