#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "censwald/estimator.hpp"
#include "censwald/varest.hpp"

namespace censwald::cli {

struct RunConfig {
  std::string command;  // fit, test, compare, influence, simulate, kmplot

  // Data.
  std::vector<std::filesystem::path> inputs;
  std::string dataset;  // bundled data set name, e.g. "veteran"
  std::optional<std::string> time_column;
  std::optional<std::string> status_column;
  std::string arm_column;
  std::vector<std::string> arms;

  // Model and tests.
  std::string family = "weibull";
  std::vector<double> alpha_grid;
  std::vector<std::string> hypotheses;
  double level = 0.05;
  // Model unless given; the weibull-2-5 preset defaults to Empirical.
  std::optional<LambdaKind> lambda_kind;

  // influence
  std::vector<double> theta;
  std::vector<double> t_grid;
  std::vector<double> pif_direction;

  // simulate
  std::string preset;
  std::string kind = "level_power";
  std::size_t n = 100;
  std::size_t replications = 1000;
  std::optional<double> censoring_rate;
  std::optional<double> censoring_mean;
  double contamination = 0.0;
  std::string contamination_family = "exp";
  std::vector<double> contamination_theta{5.0};

  std::filesystem::path out = ".";
  std::uint64_t seed = 20240601;
  unsigned workers = 1;
  bool quiet = false;
};

/// One row of the fit table (fit.csv). Round-trips through write_fit_csv / read_fit_csv.
struct FitRow {
  double alpha = 0.0;
  Vec theta;
  Vec se;
  double objective = 0.0;
  double eqn_residual = 0.0;
  bool converged = false;
  std::string method;
  int iterations = 0;
  double residual_mass = 0.0;

  static FitRow from(const FitResult& r);
  friend bool operator==(const FitRow&, const FitRow&) = default;
};

void write_fit_csv(const std::vector<FitRow>& rows, const std::vector<std::string>& names,
                   const std::filesystem::path& path);
std::vector<FitRow> read_fit_csv(const std::filesystem::path& path);

/// a:b:step (inclusive), or a comma-separated list, or a single value.
std::vector<double> parse_grid(const std::string& text);
std::vector<double> parse_list(const std::string& text);

/// Executes a configured command. Returns the process exit status: 0 when every requested
/// computation converged and no report was flagged invalid, 1 otherwise, 2 for bad input.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command-line entry point (argument parsing, environment overrides, run()).
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace censwald::cli
