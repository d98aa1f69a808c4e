// jointloc command line: simulate, solve, evaluate, sweep, preset.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jointloc/harness.hpp"
#include "jointloc/io.hpp"
#include "jointloc/sim.hpp"

namespace
{

using namespace jointloc;

std::vector<TestPoint> load_test_points(const std::string& path)
{
  return path.empty() ? default_test_points() : read_test_points(path);
}

std::ofstream open_out(const std::string& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
  {
    throw std::runtime_error("cannot write '" + path + "'");
  }
  return out;
}

std::vector<double> parse_eta_list(const std::string& text)
{
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
  {
    if (!item.empty())
    {
      out.push_back(std::stod(item));
    }
  }
  if (out.empty())
  {
    throw std::invalid_argument("--eta: empty list");
  }
  return out;
}

TrialConfig make_trials(const std::string& tps, int trials, std::uint64_t seed, double sync_std)
{
  TrialConfig config;
  config.test_points = load_test_points(tps);
  config.trials_per_point = trials;
  config.seed = seed;
  config.sync_std_m = sync_std;
  config.validate();
  return config;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Probabilistic joint ToA/AoA localization: simulation, estimation and evaluation"};
  app.require_subcommand(1);

  std::string scene_path;
  std::string tps_path;
  std::string out_path;
  std::string out_dir;
  int trials = 10;
  std::uint64_t seed = 0;
  double sync_std = 0.0;

  auto* simulate = app.add_subcommand("simulate", "Synthesize measurements at every test point");
  simulate->add_option("--scene", scene_path, "Scene JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--tps", tps_path, "Test point CSV (default: built-in 28-point grid)")->check(CLI::ExistingFile);
  simulate->add_option("--trials", trials, "Epochs per test point")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", seed, "Master seed");
  simulate->add_option("--sync-std-m", sync_std, "Extra ToA synchronization error std (m)")->check(CLI::NonNegativeNumber);
  simulate->add_option("--out", out_path, "Measurement CSV")->required();

  std::string meas_path;
  std::string algo = "joint";
  auto* solve = app.add_subcommand("solve", "Run one estimator over recorded epochs");
  solve->add_option("--scene", scene_path, "Scene JSON")->required()->check(CLI::ExistingFile);
  solve->add_option("--meas", meas_path, "Measurement CSV")->required()->check(CLI::ExistingFile);
  solve->add_option("--algo", algo, "toa-nls | toa-map | aoa | joint")
      ->check(CLI::IsMember({"toa-nls", "toa-map", "aoa", "joint"}));
  solve->add_option("--out", out_path, "Estimate CSV")->required();

  std::string algos = "joint,toa-nls,aoa";
  auto* evaluate = app.add_subcommand("evaluate", "Monte-Carlo evaluation of several estimators");
  evaluate->add_option("--scene", scene_path, "Scene JSON")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--tps", tps_path, "Test point CSV (default: built-in 28-point grid)")->check(CLI::ExistingFile);
  evaluate->add_option("--trials", trials, "Epochs per test point")->check(CLI::PositiveNumber);
  evaluate->add_option("--seed", seed, "Master seed");
  evaluate->add_option("--sync-std-m", sync_std, "Extra ToA synchronization error std (m)")->check(CLI::NonNegativeNumber);
  evaluate->add_option("--algos", algos, "Comma separated estimators");
  evaluate->add_option("--out-dir", out_dir, "Output directory")->required();

  std::string eta = "0,0.5,1,2,4";
  auto* sweep = app.add_subcommand("sweep", "Synchronization-error sweep for toa-nls and joint");
  sweep->add_option("--scene", scene_path, "Scene JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("--tps", tps_path, "Test point CSV (default: built-in 28-point grid)")->check(CLI::ExistingFile);
  sweep->add_option("--trials", trials, "Epochs per test point")->check(CLI::PositiveNumber);
  sweep->add_option("--seed", seed, "Master seed");
  sweep->add_option("--eta", eta, "Comma separated sync error stds (m)");
  sweep->add_option("--out-dir", out_dir, "Output directory")->required();

  std::string preset_name;
  std::string tps_out;
  auto* preset = app.add_subcommand("preset", "Write a built-in scene");
  preset->add_option("--name", preset_name, "Preset name")->required()->check(CLI::IsMember({"arena2036"}));
  preset->add_option("--out", out_path, "Scene JSON")->required();
  preset->add_option("--tps-out", tps_out, "Also write the default test points CSV here");

  CLI11_PARSE(app, argc, argv);

  try
  {
    if (*simulate)
    {
      const SceneFile sf = read_scene_file(scene_path);
      const TrialConfig config = make_trials(tps_path, trials, seed, sync_std);
      std::vector<RecordedEpoch> epochs;
      long long epoch_id = 0;
      for (std::size_t tp = 0; tp < config.test_points.size(); ++tp)
      {
        for (int e = 0; e < config.trials_per_point; ++e)
        {
          epochs.push_back(to_recorded(
              synthesize_epoch(sf.scene, config.test_points[tp], tp, e, config.sync_std_m, config.seed), epoch_id++));
        }
      }
      std::ofstream out = open_out(out_path);
      write_measurements(out, epochs);
    }
    else if (*solve)
    {
      const SceneFile sf = read_scene_file(scene_path);
      std::ifstream in(meas_path, std::ios::binary);
      const std::vector<RecordedEpoch> epochs = parse_measurements(in);
      const Algorithm algorithm = parse_algorithm(algo);
      std::vector<EstimateRow> rows;
      int failures = 0;
      for (const auto& e : epochs)
      {
        try
        {
          rows.push_back(EstimateRow{e.epoch_id, e.tp_label, algorithm,
                                     run_algorithm(algorithm, sf.scene, e.toa, e.aoa, sf.solver)});
        }
        catch (const std::exception& ex)
        {
          ++failures;
          std::cerr << "epoch " << e.epoch_id << ": " << ex.what() << '\n';
        }
      }
      std::ofstream out = open_out(out_path);
      write_estimates(out, rows);
      if (failures > 0)
      {
        return 2;
      }
    }
    else if (*evaluate)
    {
      const SceneFile sf = read_scene_file(scene_path);
      const TrialConfig config = make_trials(tps_path, trials, seed, sync_std);
      const std::set<Algorithm> selected = parse_algorithm_list(algos);
      const auto records = run_monte_carlo(sf.scene, config, sf.solver, selected);
      write_evaluation(out_dir, records, selected);
      std::cout << summary_json(records, selected);
    }
    else if (*sweep)
    {
      const SceneFile sf = read_scene_file(scene_path);
      const TrialConfig config = make_trials(tps_path, trials, seed, 0.0);
      const auto etas = parse_eta_list(eta);
      const auto results = sync_sweep(sf.scene, config, sf.solver, etas);
      write_sweep(out_dir, results);
      std::ifstream summary(std::filesystem::path(out_dir) / "sweep_summary.csv");
      std::cout << summary.rdbuf();
    }
    else if (*preset)
    {
      const Scene scene = arena_scene();
      std::ofstream out = open_out(out_path);
      out << scene_to_json(scene, SolverConfig::for_world(scene.bounds));
      if (!tps_out.empty())
      {
        std::ofstream tps = open_out(tps_out);
        write_test_points(tps, default_test_points());
      }
    }
  }
  catch (const std::exception& e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
