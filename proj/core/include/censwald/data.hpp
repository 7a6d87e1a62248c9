#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "censwald/linalg.hpp"
#include "censwald/model.hpp"

namespace censwald {

/// One observed pair (z, delta): z = min(X, C), delta = 1 when the lifetime was observed.
struct CensoredObservation {
  double z = 0.0;
  int delta = 1;

  bool event() const noexcept { return delta == 1; }
  friend bool operator==(const CensoredObservation&, const CensoredObservation&) = default;
};

/// Canonical order: ascending z; at tied z, events precede censorings.
bool canonical_less(const CensoredObservation& a, const CensoredObservation& b) noexcept;

/// An immutable right-censored sample held in canonical order.
class CensoredSample {
 public:
  /// Validates (z >= 0 finite, delta in {0,1}, n >= 1) and sorts.
  explicit CensoredSample(std::vector<CensoredObservation> observations);
  CensoredSample(std::span<const double> times, std::span<const int> status);

  std::size_t size() const noexcept { return obs_.size(); }
  std::span<const CensoredObservation> observations() const noexcept { return obs_; }
  const CensoredObservation& operator[](std::size_t i) const { return obs_[i]; }

  /// Ordered times Z_(1,n) <= ... <= Z_(n,n).
  std::span<const double> times() const noexcept { return times_; }
  std::size_t event_count() const noexcept { return events_; }
  std::size_t censored_count() const noexcept { return obs_.size() - events_; }

  /// Multiplies every time by c > 0.
  CensoredSample scaled(double c) const;
  /// The sample with one extra observation appended (re-sorted).
  CensoredSample with(CensoredObservation extra) const;

  friend bool operator==(const CensoredSample& a, const CensoredSample& b) { return a.obs_ == b.obs_; }

 private:
  std::vector<CensoredObservation> obs_;
  std::vector<double> times_;
  std::size_t events_ = 0;
};

struct CsvColumns {
  std::string time = "time";
  std::string status = "status";
};

/// Reads a comma-separated file with a header row. Errors carry row and column.
CensoredSample ingest_csv(const std::filesystem::path& path, const CsvColumns& columns = {});

/// Same, split by the values of `arm_column`; arms are keyed by their label.
std::map<std::string, CensoredSample> ingest_csv_arms(const std::filesystem::path& path,
                                                      const CsvColumns& columns,
                                                      const std::string& arm_column);

/// Writes "time,status" (or the given column names) in canonical order.
void write_csv(const CensoredSample& sample, const std::filesystem::path& path,
               const CsvColumns& columns = {});

/// A lifetime distribution: family plus parameter.
struct LifetimeModel {
  FamilyId family = FamilyId::Exponential;
  Vec theta;

  const Family& get() const { return censwald::family(family); }
};

/// Data-generating design for simulations: lifetimes from the (1 - eps, eps) mixture of
/// `lifetime` and `contamination`, censored by an independent Exp(censoring_mean).
struct SyntheticDesign {
  LifetimeModel lifetime;
  double censoring_mean = 1.0;
  double contamination_fraction = 0.0;
  LifetimeModel contamination;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Draws n observations from `design`, using the random stream (design.seed, stream).
CensoredSample simulate(const SyntheticDesign& design, std::size_t n, std::uint64_t stream = 0);

/// Number of contaminated lifetimes drawn by simulate() for the same arguments.
std::size_t simulate_contaminated_count(const SyntheticDesign& design, std::size_t n,
                                        std::uint64_t stream = 0);

/// P(C < X) for C ~ Exp(mean) independent of X ~ model, by quadrature.
double censoring_probability(const LifetimeModel& model, double censoring_mean);

/// Exponential censoring mean m with P(C < X) = target_rate. Throws NumericalError when the
/// rate cannot be bracketed.
double censoring_mean_for_rate(const LifetimeModel& model, double target_rate);

/// Path of a bundled data set by name ("veteran"). Honors CENSWALD_DATA_DIR.
std::filesystem::path bundled_dataset(const std::string& name);

}  // namespace censwald
