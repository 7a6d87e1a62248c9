#include <gtest/gtest.h>

#include <atomic>
#include <sstream>

#include "censwald/montecarlo.hpp"
#include "support.hpp"

using namespace censwald;
using fixtures::vec;

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec s;
  s.design.lifetime = {FamilyId::Exponential, vec({1.0})};
  s.design.censoring_mean = 9.0;
  s.design.seed = 42;
  s.fit_family = FamilyId::Exponential;
  s.n = 60;
  s.replications = 40;
  s.alpha_grid = {0.0, 0.5};
  s.hypotheses = {Restriction::simple(vec({1.0}), "theta=1"), Restriction::simple(vec({1.5}), "theta=1.5")};
  s.keep_p_values = true;
  return s;
}

}  // namespace

TEST(MonteCarlo, ParallelForVisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(1000, 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw std::runtime_error("x"); }),
               std::runtime_error);
}

TEST(MonteCarlo, DeterministicAcrossWorkerCounts) {
  ExperimentSpec a = small_spec();
  ExperimentSpec b = small_spec();
  b.workers = 4;
  const auto ra = run_experiment(a);
  const auto rb = run_experiment(b);
  ASSERT_EQ(ra.rejections.size(), rb.rejections.size());
  for (std::size_t i = 0; i < ra.rejections.size(); ++i) {
    EXPECT_EQ(ra.rejections[i].rejections, rb.rejections[i].rejections);
    EXPECT_EQ(ra.rejections[i].p_values, rb.rejections[i].p_values);
  }
  EXPECT_EQ(ra.failures, rb.failures);
}

TEST(MonteCarlo, LevelPowerReport) {
  const auto r = run_experiment(small_spec());
  ASSERT_EQ(r.rejections.size(), 4u);
  EXPECT_TRUE(r.valid);
  for (const auto& row : r.rejections) {
    EXPECT_EQ(row.valid, 40u);
    EXPECT_NEAR(row.rate, static_cast<double>(row.rejections) / row.valid, 1e-15);
    EXPECT_NEAR(row.std_error, std::sqrt(row.rate * (1 - row.rate) / row.valid), 1e-15);
    EXPECT_EQ(row.p_values.size(), row.valid);
  }
  // theta = 1.5 against data with mean 1 at n = 60 is rejected nearly always.
  EXPECT_GE(r.rejections[1].rate, 0.8);
  std::ostringstream os;
  r.write_summary(os);
  EXPECT_NE(os.str().find("theta=1.5"), std::string::npos);
  const auto p = std::filesystem::temp_directory_path() / "censwald_mc.csv";
  r.write_csv(p);
  EXPECT_TRUE(std::filesystem::exists(p));
}

TEST(MonteCarlo, MseAndVarianceRatio) {
  ExperimentSpec s = small_spec();
  s.kind = ExperimentKind::VarianceRatio;
  s.replications = 200;
  s.n = 200;
  const auto r = run_experiment(s);
  ASSERT_EQ(r.estimates.size(), 2u);
  for (const auto& e : r.estimates) {
    EXPECT_NEAR(e.mean_estimate, 1.0, 0.05);
    EXPECT_NEAR(e.ratio, e.mean_variance / e.mse, 1e-12);
    EXPECT_GT(e.ratio, 0.6);
    EXPECT_LT(e.ratio, 1.6);
  }
  s.kind = ExperimentKind::Mse;
  EXPECT_EQ(run_experiment(s).estimates.size(), 2u);
}

TEST(MonteCarlo, CustomEstimatorAndFailures) {
  ExperimentSpec s = small_spec();
  s.estimator = [](const CensoredSample& x, double) {
    ReplicationEstimate e;
    if (x[0].z < 0.02) return e;  // reported as a failure
    e.theta = vec({1.0});
    e.sigma = Mat::Identity(1, 1);
    e.ok = true;
    return e;
  };
  const auto r = run_experiment(s);
  for (const auto& row : r.rejections) EXPECT_EQ(row.valid + r.failures[0], 40u);
}

TEST(MonteCarlo, SpecValidation) {
  ExperimentSpec s = small_spec();
  s.replications = 0;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = small_spec();
  s.hypotheses.clear();
  EXPECT_THROW(run_level_power(s), InvalidArgument);
}
