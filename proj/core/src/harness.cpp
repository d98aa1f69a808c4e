#include "jointloc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "jointloc/aoa.hpp"
#include "jointloc/toa.hpp"

namespace jointloc
{

std::string_view to_string(Algorithm algorithm)
{
  switch (algorithm)
  {
    case Algorithm::ToaNls:
      return "toa_nls";
    case Algorithm::ToaMap:
      return "toa_map";
    case Algorithm::Aoa:
      return "aoa";
    case Algorithm::Joint:
      return "joint";
  }
  throw std::invalid_argument("unknown algorithm");
}

Algorithm parse_algorithm(std::string_view name)
{
  std::string normalized(name);
  std::replace(normalized.begin(), normalized.end(), '-', '_');
  for (const Algorithm a : {Algorithm::ToaNls, Algorithm::ToaMap, Algorithm::Aoa, Algorithm::Joint})
  {
    if (normalized == to_string(a))
    {
      return a;
    }
  }
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

std::set<Algorithm> parse_algorithm_list(std::string_view list)
{
  std::set<Algorithm> out;
  std::size_t begin = 0;
  while (begin <= list.size())
  {
    const std::size_t end = std::min(list.find(',', begin), list.size());
    const std::string_view item = list.substr(begin, end - begin);
    if (!item.empty())
    {
      out.insert(parse_algorithm(item));
    }
    begin = end + 1;
  }
  if (out.empty())
  {
    throw std::invalid_argument("empty algorithm list");
  }
  return out;
}

Estimate run_algorithm(Algorithm algorithm, const Scene& scene, std::span<const ToaMeasurement> toa,
                       std::span<const AoaMeasurement> aoa, const SolverConfig& config)
{
  switch (algorithm)
  {
    case Algorithm::ToaNls:
      return nls_estimate(scene.toa_locators, toa, config);
    case Algorithm::ToaMap:
      return map_toa_estimate(scene.toa_locators, scene.toa_noise, toa, config);
    case Algorithm::Aoa:
      return aoa_estimate(scene.aoa_locators, aoa, config);
    case Algorithm::Joint:
      return joint_estimate(scene, toa, aoa, config);
  }
  throw std::invalid_argument("unknown algorithm");
}

std::vector<TrialRecord> run_monte_carlo(const Scene& scene, const TrialConfig& trials, const SolverConfig& solver,
                                         const std::set<Algorithm>& algorithms)
{
  if (algorithms.empty())
  {
    throw std::invalid_argument("run_monte_carlo: no algorithms requested");
  }
  scene.validate();
  trials.validate();
  solver.validate();

  std::vector<TrialRecord> records;
  records.reserve(trials.test_points.size() * static_cast<std::size_t>(trials.trials_per_point) * algorithms.size());
  for (std::size_t tp = 0; tp < trials.test_points.size(); ++tp)
  {
    const TestPoint& point = trials.test_points[tp];
    for (int epoch = 0; epoch < trials.trials_per_point; ++epoch)
    {
      const Epoch data = synthesize_epoch(scene, point, tp, epoch, trials.sync_std_m, trials.seed);
      for (const Algorithm algorithm : algorithms)
      {
        TrialRecord rec;
        rec.tp_label = point.label;
        rec.epoch = epoch;
        rec.algorithm = algorithm;
        try
        {
          rec.est = run_algorithm(algorithm, scene, data.toa, data.aoa, solver);
        }
        catch (const std::exception&)
        {
          rec.est = Estimate{};
          rec.est.position = Point3(solver.bounds.center());
          rec.est.log_likelihood = -std::numeric_limits<double>::infinity();
          rec.est.start_index = -1;
        }
        rec.horiz_err_m = horizontal_error(rec.est.position, point.position);
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

std::vector<double> errors_for(std::span<const TrialRecord> records, Algorithm algorithm)
{
  std::vector<double> out;
  for (const auto& r : records)
  {
    if (r.algorithm == algorithm)
    {
      out.push_back(r.horiz_err_m);
    }
  }
  return out;
}

std::vector<CdfPoint> error_cdf(std::span<const double> errors)
{
  if (errors.empty())
  {
    throw std::invalid_argument("error_cdf: empty input");
  }
  std::vector<double> sorted(errors.begin(), errors.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  std::vector<CdfPoint> cdf;
  for (std::size_t i = 0; i < sorted.size(); ++i)
  {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i])
    {
      continue;
    }
    cdf.push_back(CdfPoint{sorted[i], static_cast<double>(i + 1) / n});
  }
  return cdf;
}

double nearest_rank_percentile(std::span<const double> errors, double q)
{
  if (errors.empty())
  {
    throw std::invalid_argument("nearest_rank_percentile: empty input");
  }
  if (!(q > 0.0 && q <= 1.0))
  {
    throw std::invalid_argument("nearest_rank_percentile: q must be in (0, 1]");
  }
  std::vector<double> sorted(errors.begin(), errors.end());
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

ErrorStats summarize(std::span<const double> errors)
{
  if (errors.empty())
  {
    throw std::invalid_argument("summarize: empty input");
  }
  // Sorting first makes the sums independent of record order.
  std::vector<double> sorted(errors.begin(), errors.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const double e : sorted)
  {
    sum += e;
    sum_sq += e * e;
  }
  const auto n = static_cast<double>(sorted.size());
  ErrorStats s;
  s.mean_m = sum / n;
  s.rms_m = std::sqrt(sum_sq / n);
  s.p50_m = nearest_rank_percentile(sorted, 0.5);
  s.p90_m = nearest_rank_percentile(sorted, 0.9);
  s.count = sorted.size();
  return s;
}

std::vector<PerTpRow> per_tp_stats(std::span<const TrialRecord> records)
{
  if (records.empty())
  {
    throw std::invalid_argument("per_tp_stats: empty input");
  }
  std::map<std::pair<std::string, Algorithm>, std::vector<double>> groups;
  for (const auto& r : records)
  {
    groups[{r.tp_label, r.algorithm}].push_back(r.horiz_err_m);
  }
  std::vector<PerTpRow> rows;
  rows.reserve(groups.size());
  for (auto& [key, errors] : groups)
  {
    std::sort(errors.begin(), errors.end());
    const auto n = static_cast<double>(errors.size());
    double sum = 0.0;
    for (const double e : errors)
    {
      sum += e;
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (const double e : errors)
    {
      ss += (e - mean) * (e - mean);
    }
    rows.push_back(PerTpRow{key.first, key.second, mean, std::sqrt(ss / n), errors.size()});
  }
  return rows;
}

std::vector<SweepPoint> sync_sweep(const Scene& scene, const TrialConfig& trials, const SolverConfig& solver,
                                   std::span<const double> eta_values_m)
{
  const std::set<Algorithm> algorithms = {Algorithm::ToaNls, Algorithm::Joint};
  std::vector<SweepPoint> out;
  for (const double eta : eta_values_m)
  {
    if (!(eta >= 0.0))
    {
      throw std::invalid_argument("sync_sweep: eta values must be non-negative");
    }
    TrialConfig at_eta = trials;
    at_eta.sync_std_m = eta;
    out.push_back(SweepPoint{eta, run_monte_carlo(scene, at_eta, solver, algorithms)});
  }
  return out;
}

} // namespace jointloc
