#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "censwald/data.hpp"
#include "censwald/estimator.hpp"
#include "censwald/hypothesis.hpp"

namespace censwald {

enum class ExperimentKind { LevelPower, Mse, VarianceRatio };
const char* to_string(ExperimentKind k) noexcept;

/// What a replication produces for one alpha: a point estimate and its sandwich covariance.
struct ReplicationEstimate {
  Vec theta;
  Mat sigma;
  bool ok = false;
};

/// Replaces the MDPDE fit inside an experiment (sample, alpha) -> estimate.
using EstimatorFn = std::function<ReplicationEstimate(const CensoredSample&, double)>;

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::LevelPower;
  SyntheticDesign design;
  /// Family fitted to the simulated data.
  FamilyId fit_family = FamilyId::Weibull;
  std::size_t n = 100;
  std::size_t replications = 1000;
  std::vector<double> alpha_grid{0.0};
  std::vector<Restriction> hypotheses;
  double level = 0.05;
  unsigned workers = 1;
  /// Solver settings; alpha is overwritten per grid point.
  FitConfig fit = [] {
    FitConfig c;
    c.n_multistart = 0;
    return c;
  }();
  /// Optional replacement for the MDPDE fit.
  EstimatorFn estimator;
  /// Keep per-replication p-values in the report (level/power only).
  bool keep_p_values = false;

  void validate() const;
};

struct RejectionRow {
  double alpha = 0.0;
  std::string hypothesis;
  std::size_t rejections = 0;
  std::size_t valid = 0;
  double rate = 0.0;
  double std_error = 0.0;
  /// In replication order, failed replications skipped.
  std::vector<double> p_values;
};

struct EstimationRow {
  double alpha = 0.0;
  std::size_t component = 0;
  std::string parameter;
  std::size_t valid = 0;
  double mean_estimate = 0.0;
  double mse = 0.0;
  /// Mean of Sigma-hat_jj / n across replications.
  double mean_variance = 0.0;
  /// mean_variance / mse.
  double ratio = 0.0;
};

struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::LevelPower;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t replications = 0;
  double level = 0.05;
  std::string design_summary;
  std::vector<double> alpha_grid;
  std::vector<std::size_t> failures;  // per alpha
  std::vector<RejectionRow> rejections;
  std::vector<EstimationRow> estimates;
  bool valid = true;
  double wall_seconds = 0.0;

  std::size_t total_failures() const;
  void write_csv(const std::filesystem::path& path) const;
  void write_summary(std::ostream& out) const;
};

/// Calls fn(i) for i in [0, count) on `workers` threads (1 = inline). The first exception
/// thrown by fn is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

ExperimentReport run_level_power(const ExperimentSpec& spec);
ExperimentReport run_mse(const ExperimentSpec& spec);
ExperimentReport run_variance_ratio(const ExperimentSpec& spec);
/// Dispatches on spec.kind.
ExperimentReport run_experiment(const ExperimentSpec& spec);

/// Human-readable one-line description of a design.
std::string describe(const SyntheticDesign& design);

}  // namespace censwald
