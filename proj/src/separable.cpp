#include "pwcc/separable.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace pwcc {

SumForm::SumForm(std::vector<PwcFunction> components, Box domain)
    : components_(std::move(components)), domain_(std::move(domain)) {
  if (components_.size() != domain_.dimension()) {
    throw std::invalid_argument("sum form needs one component per coordinate");
  }
  for (std::size_t j = 0; j < components_.size(); ++j) {
    if (!(components_[j].domain() == domain_.axis(j))) {
      throw std::invalid_argument("component " + std::to_string(j + 1) +
                                  " domain differs from the box interval");
    }
  }
}

double eval_sumform(const SumForm& sf, std::span<const double> x) {
  if (x.size() != sf.dimension()) {
    throw std::invalid_argument("point has dimension " + std::to_string(x.size()) +
                                ", model expects " + std::to_string(sf.dimension()));
  }
  double total = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) total += eval_pwc(sf.component(j), x[j]).value;
  return total;
}

std::vector<std::size_t> sumform_winners(const SumForm& sf, std::span<const double> x) {
  if (x.size() != sf.dimension()) throw std::invalid_argument("point dimension mismatch");
  std::vector<std::size_t> w(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) w[j] = eval_pwc(sf.component(j), x[j]).winner;
  return w;
}

SeparableModel build_separable(const std::vector<SeparableTerm>& terms, const Box& box, double eps,
                               std::optional<std::vector<double>> eps_split) {
  const std::size_t n = box.dimension();
  if (terms.size() != n) throw std::invalid_argument("need one term per coordinate");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");

  std::vector<double> split;
  if (eps_split) {
    split = *eps_split;
    if (split.size() != n) throw std::invalid_argument("eps split needs one entry per coordinate");
    double sum = 0.0;
    for (double e : split) {
      if (!(e > 0.0)) throw std::invalid_argument("eps split entries must be positive");
      sum += e;
    }
    if (sum > eps * (1.0 + 1e-12)) {
      throw std::invalid_argument("eps split sums to more than eps");
    }
  } else {
    split.assign(n, eps / static_cast<double>(n));
  }

  std::vector<PwcFunction> components;
  std::vector<UniGrid> grids;
  std::vector<double> kappas;
  for (std::size_t j = 0; j < n; ++j) {
    UnivariateModel m =
        build_univariate(terms[j].f, box.lower(j), box.upper(j), terms[j].kappa, split[j]);
    components.push_back(std::move(m.p));
    grids.push_back(m.grid);
    kappas.push_back(m.kappa);
  }
  return {SumForm(std::move(components), box), std::move(grids), std::move(kappas),
          std::move(split), eps};
}

PwcFunction expand_sumform(const SumForm& sf, std::size_t max_pieces) {
  const std::size_t n = sf.dimension();
  double product = 1.0;
  for (const auto& c : sf.components()) product *= static_cast<double>(c.size());
  if (product > static_cast<double>(max_pieces)) {
    char count[32];
    const auto end = std::to_chars(count, count + sizeof count, product, std::chars_format::fixed, 0).ptr;
    throw GuardError("expansion needs " + std::string(count, end) +
                     " pieces, limit is " + std::to_string(max_pieces));
  }

  const std::size_t total = static_cast<std::size_t>(product);
  std::vector<DiagQuadPiece> pieces;
  pieces.reserve(total);
  std::vector<std::size_t> index(n, 0);
  for (std::size_t k = 0; k < total; ++k) {
    DiagQuadPiece piece;
    piece.d.resize(n);
    piece.a.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const DiagQuadPiece& src = sf.component(j).piece(index[j]);
      piece.d[j] = src.d[0];
      piece.a[j] = src.a[0];
      piece.b += src.b;
    }
    pieces.push_back(std::move(piece));
    // odometer, last coordinate fastest
    for (std::size_t j = n; j-- > 0;) {
      if (++index[j] < sf.component(j).size()) break;
      index[j] = 0;
    }
  }
  return PwcFunction(std::move(pieces), sf.domain());
}

}  // namespace pwcc
