#include <algorithm>
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "jointloc/harness.hpp"
#include "jointloc/io.hpp"
#include "support.hpp"

using namespace jointloc;

namespace
{

TrialConfig small_trials(int trials, std::uint64_t seed, std::size_t tp_count = 28)
{
  TrialConfig t;
  auto tps = default_test_points();
  tps.resize(tp_count);
  t.test_points = tps;
  t.trials_per_point = trials;
  t.seed = seed;
  return t;
}

const std::set<Algorithm> kThree{Algorithm::Joint, Algorithm::ToaNls, Algorithm::Aoa};

} // namespace

TEST(RunMonteCarlo, Cardinality)
{
  const Scene s = arena_scene();
  const auto records = run_monte_carlo(s, small_trials(10, 1), SolverConfig::for_world(s.bounds), kThree);
  EXPECT_EQ(records.size(), 840u);
  // Ordered by test point, epoch, then algorithm.
  EXPECT_EQ(records[0].tp_label, "A01");
  EXPECT_EQ(records[0].algorithm, Algorithm::ToaNls);
  EXPECT_EQ(records[1].algorithm, Algorithm::Aoa);
  EXPECT_EQ(records[2].algorithm, Algorithm::Joint);
  EXPECT_EQ(records[3].epoch, 1);
  EXPECT_EQ(records.back().tp_label, "A28");
  EXPECT_EQ(records.back().epoch, 9);
  for (const auto& r : records)
  {
    EXPECT_GE(r.horiz_err_m, 0.0);
  }
}

TEST(RunMonteCarlo, SameSeedSameRecords)
{
  const Scene s = arena_scene();
  const SolverConfig c = SolverConfig::for_world(s.bounds);
  const std::set<Algorithm> all{Algorithm::Joint, Algorithm::ToaNls, Algorithm::ToaMap, Algorithm::Aoa};
  EXPECT_EQ(run_monte_carlo(s, small_trials(3, 5, 6), c, all), run_monte_carlo(s, small_trials(3, 5, 6), c, all));
  EXPECT_NE(run_monte_carlo(s, small_trials(3, 5, 6), c, all), run_monte_carlo(s, small_trials(3, 6, 6), c, all));
}

TEST(RunMonteCarlo, DegenerateNoiseIsExact)
{
  // The four ceiling locators are coplanar and symmetric: on the x = 10 m
  // column d1 = d2 and d3 = d4, so ToA alone leaves (y, z, tau) on a curve.
  // Pinning the height at the test-point height restores identifiability.
  const Scene s = with_degenerate_noise(arena_scene());
  SolverConfig config = SolverConfig::for_world(s.bounds);
  config.fixed_z = 1.0;
  const std::set<Algorithm> all{Algorithm::Joint, Algorithm::ToaNls, Algorithm::ToaMap, Algorithm::Aoa};
  const auto records = run_monte_carlo(s, small_trials(2, 3), config, all);
  for (const auto& r : records)
  {
    EXPECT_LT(r.horiz_err_m, 1e-4) << r.tp_label << ' ' << to_string(r.algorithm);
  }
}

TEST(RunMonteCarlo, SymmetricColumnIsUnidentifiableFromToaAlone)
{
  // Without the height constraint the x = 10 m column is ambiguous for
  // ToA-only estimators, while the bearings still pin the joint fix.
  const Scene s = with_degenerate_noise(arena_scene());
  TrialConfig t;
  t.test_points = {default_test_points()[3]}; // A04, x = 10 m
  t.trials_per_point = 1;
  const auto records = run_monte_carlo(s, t, SolverConfig::for_world(s.bounds), {Algorithm::Joint});
  EXPECT_LT(records[0].horiz_err_m, 1e-4);
}

TEST(RunMonteCarlo, SolverFailureIsRecorded)
{
  // A ToA-only scene with two locators cannot support toa_nls; the failure
  // becomes a record instead of aborting the run.
  Scene s = arena_scene();
  s.toa_locators.resize(2);
  const SolverConfig c = SolverConfig::for_world(s.bounds);
  const auto records = run_monte_carlo(s, small_trials(1, 0, 2), c, {Algorithm::ToaNls, Algorithm::Joint});
  ASSERT_EQ(records.size(), 4u);
  EXPECT_EQ(records[0].algorithm, Algorithm::ToaNls);
  EXPECT_FALSE(records[0].est.converged);
  EXPECT_EQ(records[0].est.start_index, -1);
  EXPECT_EQ(records[0].est.log_likelihood, -std::numeric_limits<double>::infinity());
  EXPECT_EQ(records[0].est.position.vec(), c.bounds.center());
  EXPECT_NE(records[1].est.start_index, -1);
}

TEST(RunMonteCarlo, RejectsEmptyAlgorithmSet)
{
  const Scene s = arena_scene();
  EXPECT_THROW(run_monte_carlo(s, small_trials(1, 0), SolverConfig::for_world(s.bounds), {}), std::invalid_argument);
}

TEST(ErrorCdf, Steps)
{
  const std::vector<double> e{4, 2, 3, 1};
  const auto cdf = error_cdf(e);
  ASSERT_EQ(cdf.size(), 4u);
  for (int i = 0; i < 4; ++i)
  {
    EXPECT_EQ(cdf[i].error_m, i + 1.0);
    EXPECT_EQ(cdf[i].fraction, 0.25 * (i + 1));
  }
}

TEST(ErrorCdf, AllEqualIsSingleStep)
{
  const std::vector<double> e(7, 2.5);
  const auto cdf = error_cdf(e);
  ASSERT_EQ(cdf.size(), 1u);
  EXPECT_EQ(cdf[0].error_m, 2.5);
  EXPECT_EQ(cdf[0].fraction, 1.0);
}

TEST(ErrorCdf, MonotoneAndEndsAtOne)
{
  testing_support::Gen gen(101);
  std::vector<double> e;
  for (int i = 0; i < 1000; ++i)
  {
    e.push_back(std::round(gen.uniform(0, 5) * 10) / 10);
  }
  const auto cdf = error_cdf(e);
  for (std::size_t i = 1; i < cdf.size(); ++i)
  {
    EXPECT_GT(cdf[i].error_m, cdf[i - 1].error_m);
    EXPECT_GE(cdf[i].fraction, cdf[i - 1].fraction);
  }
  EXPECT_EQ(cdf.back().fraction, 1.0);
  EXPECT_THROW(error_cdf({}), std::invalid_argument);
}

TEST(Summarize, TwoPoints)
{
  const std::vector<double> e{3, 4};
  const ErrorStats s = summarize(e);
  EXPECT_DOUBLE_EQ(s.mean_m, 3.5);
  EXPECT_NEAR(s.rms_m, std::sqrt(12.5), 1e-15);
  EXPECT_NEAR(s.rms_m, 3.5355, 1e-4);
  EXPECT_EQ(s.p50_m, 3.0);
  EXPECT_EQ(s.p90_m, 4.0);
  EXPECT_EQ(s.count, 2u);
}

TEST(Summarize, Constant)
{
  const std::vector<double> e(9, 1.25);
  const ErrorStats s = summarize(e);
  EXPECT_DOUBLE_EQ(s.mean_m, 1.25);
  EXPECT_DOUBLE_EQ(s.rms_m, 1.25);
  EXPECT_EQ(s.p50_m, 1.25);
  EXPECT_EQ(s.p90_m, 1.25);
  EXPECT_THROW(summarize({}), std::invalid_argument);
}

TEST(Summarize, NearestRank)
{
  std::vector<double> e;
  for (int i = 1; i <= 10; ++i)
  {
    e.push_back(i);
  }
  EXPECT_EQ(nearest_rank_percentile(e, 0.5), 5.0);
  EXPECT_EQ(nearest_rank_percentile(e, 0.9), 9.0);
  EXPECT_EQ(nearest_rank_percentile(e, 0.91), 10.0);
  EXPECT_EQ(nearest_rank_percentile(e, 1.0), 10.0);
  e.push_back(11);
  EXPECT_EQ(nearest_rank_percentile(e, 0.5), 6.0);
  EXPECT_EQ(nearest_rank_percentile(e, 0.9), 10.0);
}

TEST(Summarize, PermutationInvariant)
{
  testing_support::Gen gen(102);
  std::vector<double> e;
  for (int i = 0; i < 501; ++i)
  {
    e.push_back(std::abs(gen.normal()) * 3);
  }
  const ErrorStats a = summarize(e);
  for (int k = 0; k < 20; ++k)
  {
    std::shuffle(e.begin(), e.end(), gen.engine());
    const ErrorStats b = summarize(e);
    EXPECT_EQ(a.mean_m, b.mean_m);
    EXPECT_EQ(a.rms_m, b.rms_m);
    EXPECT_EQ(a.p50_m, b.p50_m);
    EXPECT_EQ(a.p90_m, b.p90_m);
  }
}

TEST(Summarize, FilterThenSummarizeIgnoresRecordOrder)
{
  const Scene s = arena_scene();
  auto records = run_monte_carlo(s, small_trials(2, 4, 5), SolverConfig::for_world(s.bounds), kThree);
  const ErrorStats a = summarize(errors_for(records, Algorithm::Joint));
  std::reverse(records.begin(), records.end());
  const ErrorStats b = summarize(errors_for(records, Algorithm::Joint));
  EXPECT_EQ(a.mean_m, b.mean_m);
  EXPECT_EQ(a.p90_m, b.p90_m);
  std::ostringstream x;
  std::ostringstream y;
  std::reverse(records.begin(), records.end());
  x << summary_json(records, kThree);
  std::reverse(records.begin(), records.end());
  y << summary_json(records, kThree);
  EXPECT_EQ(x.str(), y.str());
}

TEST(PerTpStats, SingleRecordHasZeroStd)
{
  std::vector<TrialRecord> r{{"A01", 0, Algorithm::Joint, Estimate{}, 1.7}};
  const auto rows = per_tp_stats(r);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].mean_m, 1.7);
  EXPECT_EQ(rows[0].std_m, 0.0);
  EXPECT_EQ(rows[0].count, 1u);
}

TEST(PerTpStats, PopulationStd)
{
  std::vector<TrialRecord> r{{"A01", 0, Algorithm::Joint, Estimate{}, 1.0},
                             {"A01", 1, Algorithm::Joint, Estimate{}, 3.0}};
  const auto rows = per_tp_stats(r);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].mean_m, 2.0);
  EXPECT_EQ(rows[0].std_m, 1.0);
  EXPECT_THROW(per_tp_stats({}), std::invalid_argument);
}

TEST(PerTpStats, RowCount)
{
  const Scene s = arena_scene();
  const auto records = run_monte_carlo(s, small_trials(2, 8), SolverConfig::for_world(s.bounds), kThree);
  const auto rows = per_tp_stats(records);
  EXPECT_EQ(rows.size(), 28u * 3u);
  EXPECT_TRUE(std::is_sorted(rows.begin(), rows.end(), [](const PerTpRow& a, const PerTpRow& b) {
    return std::tie(a.tp_label, a.algorithm) < std::tie(b.tp_label, b.algorithm);
  }));
}

TEST(SyncSweep, BaseCaseMatchesPlainRun)
{
  const Scene s = arena_scene();
  const SolverConfig c = SolverConfig::for_world(s.bounds);
  const TrialConfig t = small_trials(2, 12, 6);
  const std::vector<double> etas{0.0, 1.0};
  const auto sweep = sync_sweep(s, t, c, etas);
  ASSERT_EQ(sweep.size(), 2u);
  EXPECT_EQ(sweep[0].eta_m, 0.0);
  EXPECT_EQ(sweep[0].records, run_monte_carlo(s, t, c, {Algorithm::ToaNls, Algorithm::Joint}));
  TrialConfig t1 = t;
  t1.sync_std_m = 1.0;
  EXPECT_EQ(sweep[1].records, run_monte_carlo(s, t1, c, {Algorithm::ToaNls, Algorithm::Joint}));
  const std::vector<double> bad{-1.0};
  EXPECT_THROW(sync_sweep(s, t, c, bad), std::invalid_argument);
}

TEST(HarnessProperty, PairedDesign)
{
  // Every algorithm in one epoch sees the measurements synthesize_epoch
  // produces for that cell; re-running any single algorithm on them
  // reproduces its record exactly.
  const Scene s = arena_scene();
  const SolverConfig c = SolverConfig::for_world(s.bounds);
  const TrialConfig t = small_trials(2, 21, 4);
  const std::set<Algorithm> all{Algorithm::Joint, Algorithm::ToaNls, Algorithm::ToaMap, Algorithm::Aoa};
  const auto records = run_monte_carlo(s, t, c, all);
  std::size_t i = 0;
  for (std::size_t tp = 0; tp < t.test_points.size(); ++tp)
  {
    for (int e = 0; e < t.trials_per_point; ++e)
    {
      const Epoch ep = synthesize_epoch(s, t.test_points[tp], tp, e, t.sync_std_m, t.seed);
      for (const Algorithm a : all)
      {
        ASSERT_EQ(records[i].algorithm, a);
        EXPECT_EQ(records[i].est, run_algorithm(a, s, ep.toa, ep.aoa, c));
        ++i;
      }
    }
  }
}

TEST(HarnessProperty, RecordsCsvRoundTrip)
{
  const Scene s = arena_scene();
  const std::set<Algorithm> all{Algorithm::Joint, Algorithm::ToaNls, Algorithm::ToaMap, Algorithm::Aoa};
  auto records = run_monte_carlo(s, small_trials(2, 31, 10), SolverConfig::for_world(s.bounds), all);
  // Include a failure record with -inf likelihood.
  TrialRecord failed = records.front();
  failed.est.log_likelihood = -std::numeric_limits<double>::infinity();
  failed.est.start_index = -1;
  failed.est.converged = false;
  failed.est.tau.reset();
  records.push_back(failed);
  std::stringstream buffer;
  write_records(buffer, records);
  EXPECT_EQ(parse_records(buffer), records);
}

TEST(Algorithm, Names)
{
  EXPECT_EQ(to_string(Algorithm::ToaNls), "toa_nls");
  EXPECT_EQ(parse_algorithm("toa-map"), Algorithm::ToaMap);
  EXPECT_EQ(parse_algorithm("aoa"), Algorithm::Aoa);
  EXPECT_THROW(parse_algorithm("gps"), std::invalid_argument);
  EXPECT_EQ(parse_algorithm_list("joint,toa-nls,aoa"), kThree);
  EXPECT_THROW(parse_algorithm_list(""), std::invalid_argument);
}
