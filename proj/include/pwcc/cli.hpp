#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace pwcc::cli {

enum ExitCode : int {
  kOk = 0,
  kBoundViolated = 1,  // also: a property check failed
  kConfigError = 2,
  kBuildError = 3,
};

inline constexpr std::uint64_t kDefaultSeed = 42;

/// Everything a command needs; filled from the command line.
struct RunConfig {
  std::string command;

  std::string function;
  std::vector<std::string> components;
  std::vector<double> lower;
  std::vector<double> upper;
  std::optional<double> eps;
  std::vector<double> kappa;
  std::optional<double> mu;
  std::optional<double> target_eps;
  std::vector<double> eps_split;
  std::vector<double> deltas;
  std::size_t grid = 11;
  std::size_t mu_samples = 11;
  std::size_t lipschitz_samples = 10'000;  // per unit length
  std::size_t random_samples = 1000;
  std::size_t max_pieces = 100'000;
  bool expand = false;
  double gradient_step = 1e-5;
  double hessian_step = 1e-3;

  std::string model;
  std::string point;
  std::string points_csv;

  std::optional<std::string> out;
  std::optional<std::string> report;
  std::vector<std::size_t> density;
  std::uint64_t seed = kDefaultSeed;
  double safety = 1.1;
};

int cmd_approx_uni(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_approx_c2(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_approx_sep(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_study(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sample(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv (argv[0] is the program name) and dispatches. Usage errors
/// return kConfigError.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pwcc::cli
