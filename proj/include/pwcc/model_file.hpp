#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "pwcc/core.hpp"
#include "pwcc/separable.hpp"

namespace pwcc {

inline constexpr int kModelFormatVersion = 1;

/// Where a model came from. Fields that a builder does not produce stay empty
/// and are omitted from the file.
struct Provenance {
  std::string builder;  // "univariate" | "dc" | "separable"
  std::optional<double> eps;
  std::optional<double> kappa;
  std::optional<std::vector<double>> kappas;    // separable, per coordinate
  std::optional<std::vector<double>> eps_split; // separable, per coordinate
  std::optional<double> mu;
  std::optional<bool> mu_heuristic;
  std::optional<double> delta;
  std::optional<std::vector<double>> deltas;    // separable, per coordinate
  std::optional<std::size_t> n_p;
  std::optional<std::size_t> grid_per_axis;
  std::optional<double> achieved_error;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct ModelFile {
  std::variant<PwcFunction, SumForm> payload;
  Provenance meta;

  bool is_sumform() const noexcept { return std::holds_alternative<SumForm>(payload); }
  std::size_t dimension() const;
  const Box& domain() const;
};

/// Value at x (max form or sum form).
double eval_model(const ModelFile& m, std::span<const double> x);

/// Schema or invariant problem found while reading a model.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// JSON text with fixed field order; numbers use shortest round-trip decimals.
std::string to_json_text(const ModelFile& m);
/// Throws ModelError on malformed JSON, unknown version or kind, or an
/// invariant violation (e.g. "concavity violated").
ModelFile from_json_text(const std::string& text);

/// Throws std::runtime_error on I/O failure.
void save_model(const ModelFile& m, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace pwcc
