#include "jointloc/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace jointloc
{

using json = nlohmann::ordered_json;

namespace
{

constexpr std::string_view kTestPointHeader = "label,x_m,y_m,z_m";
constexpr std::string_view kMeasurementHeader = "epoch_id,tp_label,locator_id,type,value_m,ux,uy,uz,kappa";
constexpr std::string_view kRecordHeader =
    "tp_label,epoch,algorithm,x_m,y_m,z_m,tau_m,log_likelihood,converged,iterations,start_index,horiz_err_m";
constexpr std::string_view kEstimateHeader =
    "epoch_id,tp_label,algorithm,x_m,y_m,z_m,tau_m,log_likelihood,converged,iterations,start_index";

// ---- CSV helpers ----------------------------------------------------------

class CsvReader
{
public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Next non-empty line split on commas; false at end of input.
  bool next(std::vector<std::string>& fields)
  {
    std::string line;
    while (std::getline(in_, line))
    {
      ++line_no_;
      if (!line.empty() && line.back() == '\r')
      {
        line.pop_back();
      }
      if (line.empty())
      {
        continue;
      }
      fields.clear();
      std::size_t begin = 0;
      while (true)
      {
        const std::size_t end = line.find(',', begin);
        fields.push_back(line.substr(begin, end == std::string::npos ? std::string::npos : end - begin));
        if (end == std::string::npos)
        {
          break;
        }
        begin = end + 1;
      }
      current_ = line;
      return true;
    }
    return false;
  }

  std::size_t line() const { return line_no_; }
  const std::string& text() const { return current_; }

  [[noreturn]] void fail(const std::string& what) const
  {
    throw ParseError("line " + std::to_string(line_no_) + ": " + what);
  }

  void expect_header(std::string_view header)
  {
    std::vector<std::string> fields;
    if (!next(fields))
    {
      throw ParseError("line 1: missing header '" + std::string(header) + "'");
    }
    if (current_ != header)
    {
      fail("expected header '" + std::string(header) + "'");
    }
  }

  double number(const std::string& field, std::string_view name) const
  {
    if (field.empty())
    {
      fail("missing " + std::string(name));
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
    {
      fail("invalid number for " + std::string(name) + ": '" + field + "'");
    }
    return value;
  }

  long long integer(const std::string& field, std::string_view name) const
  {
    if (field.empty())
    {
      fail("missing " + std::string(name));
    }
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
    {
      fail("invalid integer for " + std::string(name) + ": '" + field + "'");
    }
    return value;
  }

  const std::string& text_field(const std::string& field, std::string_view name) const
  {
    if (field.empty())
    {
      fail("missing " + std::string(name));
    }
    return field;
  }

private:
  std::istream& in_;
  std::size_t line_no_ = 0;
  std::string current_;
};

void check_csv_text(const std::string& s)
{
  if (s.find_first_of(",\r\n") != std::string::npos)
  {
    throw std::invalid_argument("CSV field contains a separator: '" + s + "'");
  }
}

std::ifstream open_input(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw std::runtime_error("cannot open '" + path.string() + "'");
  }
  return in;
}

std::ofstream open_output(const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
  {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  return out;
}

// ---- JSON helpers ---------------------------------------------------------

Eigen::Vector3d vec3(const json& j, std::string_view name)
{
  if (!j.is_array() || j.size() != 3)
  {
    throw ParseError(std::string(name) + ": expected an array of 3 numbers");
  }
  return Eigen::Vector3d(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json to_json(const Eigen::Vector3d& v)
{
  return json::array({v.x(), v.y(), v.z()});
}

const json& field(const json& j, const char* name)
{
  if (!j.contains(name))
  {
    throw ParseError(std::string("missing field '") + name + "'");
  }
  return j.at(name);
}

GaussianMixture mixture_from_json(const json& j)
{
  if (!j.is_array())
  {
    throw ParseError("bias: expected an array of components");
  }
  std::vector<MixtureComponent> components;
  for (const auto& c : j)
  {
    components.push_back(MixtureComponent{field(c, "weight").get<double>(), field(c, "mean_m").get<double>(),
                                          field(c, "std_m").get<double>()});
  }
  return GaussianMixture(std::move(components));
}

json mixture_to_json(const GaussianMixture& g)
{
  json out = json::array();
  for (const auto& c : g.components())
  {
    out.push_back(json{{"weight", c.weight}, {"mean_m", c.mean}, {"std_m", c.std}});
  }
  return out;
}

Box box_from_json(const json& j)
{
  return Box(vec3(field(j, "min_m"), "min_m"), vec3(field(j, "max_m"), "max_m"));
}

json box_to_json(const Box& b)
{
  return json{{"min_m", to_json(b.lower)}, {"max_m", to_json(b.upper)}};
}

SolverConfig solver_from_json(const json& j, const Box& world)
{
  SolverConfig c = SolverConfig::for_world(world);
  if (j.contains("starts")) c.starts = j.at("starts").get<int>();
  if (j.contains("max_iters")) c.max_iters = j.at("max_iters").get<int>();
  if (j.contains("gradient_tolerance")) c.gradient_tolerance = j.at("gradient_tolerance").get<double>();
  if (j.contains("step_initial_m")) c.step_initial = j.at("step_initial_m").get<double>();
  if (j.contains("bounds")) c.bounds = box_from_json(j.at("bounds"));
  if (j.contains("tau_min_m")) c.tau_min = j.at("tau_min_m").get<double>();
  if (j.contains("tau_max_m")) c.tau_max = j.at("tau_max_m").get<double>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("fixed_z_m") && !j.at("fixed_z_m").is_null()) c.fixed_z = j.at("fixed_z_m").get<double>();
  c.validate();
  return c;
}

json solver_to_json(const SolverConfig& c)
{
  json j{{"starts", c.starts},
         {"max_iters", c.max_iters},
         {"gradient_tolerance", c.gradient_tolerance},
         {"step_initial_m", c.step_initial},
         {"bounds", box_to_json(c.bounds)},
         {"tau_min_m", c.tau_min},
         {"tau_max_m", c.tau_max},
         {"seed", c.seed}};
  j["fixed_z_m"] = c.fixed_z ? json(*c.fixed_z) : json(nullptr);
  return j;
}

json stats_to_json(const ErrorStats& s)
{
  return json{{"mean_m", s.mean_m}, {"rms_m", s.rms_m}, {"p50_m", s.p50_m}, {"p90_m", s.p90_m}, {"count", s.count}};
}

json cdf_to_json(const std::vector<CdfPoint>& cdf)
{
  json out = json::array();
  for (const auto& p : cdf)
  {
    out.push_back(json::array({p.error_m, p.fraction}));
  }
  return out;
}

void write_estimate_fields(std::ostream& out, const Estimate& e)
{
  out << format_double(e.position.x()) << ',' << format_double(e.position.y()) << ','
      << format_double(e.position.z()) << ',' << (e.tau ? format_double(e.tau->tau_m) : std::string()) << ','
      << format_double(e.log_likelihood) << ',' << (e.converged ? 1 : 0) << ',' << e.iterations << ','
      << e.start_index;
}

} // namespace

std::string format_double(double value)
{
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc())
  {
    throw std::runtime_error("format_double: conversion failed");
  }
  return std::string(buf, ptr);
}

// ---- scenes ---------------------------------------------------------------

SceneFile parse_scene_file(std::string_view json_text)
{
  try
  {
    const json j = json::parse(json_text);
    const Box world = box_from_json(field(j, "world_bounds"));

    std::vector<ToaLocator> toa;
    if (j.contains("toa_locators"))
    {
      for (const auto& l : j.at("toa_locators"))
      {
        toa.push_back(ToaLocator{field(l, "id").get<std::string>(), Point3(vec3(field(l, "pos_m"), "pos_m"))});
      }
    }
    std::vector<AoaLocator> aoa;
    if (j.contains("aoa_locators"))
    {
      for (const auto& l : j.at("aoa_locators"))
      {
        const Eigen::Vector3d ypr =
            l.contains("yaw_pitch_roll_rad") ? vec3(l.at("yaw_pitch_roll_rad"), "yaw_pitch_roll_rad")
                                             : Eigen::Vector3d::Zero();
        aoa.emplace_back(field(l, "id").get<std::string>(), Point3(vec3(field(l, "pos_m"), "pos_m")),
                         rotation_from_euler(ypr[0], ypr[1], ypr[2]), field(l, "kappa").get<double>());
      }
    }

    const json& noise = field(j, "toa_noise");
    const double sigma2 = field(noise, "sigma2_m2").get<double>();
    const json& bias = field(noise, "bias");
    std::optional<ToaNoiseModel> model;
    if (bias.is_array())
    {
      model.emplace(sigma2, mixture_from_json(bias));
    }
    else if (bias.is_object())
    {
      std::map<std::string, GaussianMixture> per_locator;
      std::optional<GaussianMixture> shared;
      for (const auto& [id, components] : bias.items())
      {
        if (id == "*")
        {
          shared = mixture_from_json(components);
        }
        else
        {
          per_locator.emplace(id, mixture_from_json(components));
        }
      }
      model.emplace(sigma2, std::move(per_locator), std::move(shared));
    }
    else
    {
      throw ParseError("toa_noise.bias: expected an array or an object");
    }

    Scene scene{std::move(toa), std::move(aoa), std::move(*model), world};
    scene.validate();
    SolverConfig solver = j.contains("solver") ? solver_from_json(j.at("solver"), world) : SolverConfig::for_world(world);
    return SceneFile{std::move(scene), solver};
  }
  catch (const json::exception& e)
  {
    throw ParseError(std::string("scene: ") + e.what());
  }
  catch (const std::invalid_argument& e)
  {
    throw ParseError(std::string("scene: ") + e.what());
  }
}

SceneFile read_scene_file(const std::filesystem::path& path)
{
  std::ifstream in = open_input(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scene_file(buffer.str());
}

std::string scene_to_json(const Scene& scene, const std::optional<SolverConfig>& solver)
{
  json j;
  j["world_bounds"] = box_to_json(scene.bounds);
  j["toa_locators"] = json::array();
  for (const auto& l : scene.toa_locators)
  {
    j["toa_locators"].push_back(json{{"id", l.id}, {"pos_m", to_json(l.position.vec())}});
  }
  j["aoa_locators"] = json::array();
  for (const auto& l : scene.aoa_locators)
  {
    const auto ypr = euler_from_rotation(l.orientation());
    j["aoa_locators"].push_back(json{{"id", l.id()},
                                     {"pos_m", to_json(l.position().vec())},
                                     {"yaw_pitch_roll_rad", json::array({ypr[0], ypr[1], ypr[2]})},
                                     {"kappa", l.concentration()}});
  }
  json noise{{"sigma2_m2", scene.toa_noise.sigma2()}};
  const auto& per_locator = scene.toa_noise.per_locator_bias();
  if (per_locator.empty() && scene.toa_noise.shared_bias())
  {
    noise["bias"] = mixture_to_json(*scene.toa_noise.shared_bias());
  }
  else
  {
    json bias = json::object();
    for (const auto& [id, g] : per_locator)
    {
      bias[id] = mixture_to_json(g);
    }
    if (scene.toa_noise.shared_bias())
    {
      bias["*"] = mixture_to_json(*scene.toa_noise.shared_bias());
    }
    noise["bias"] = bias;
  }
  j["toa_noise"] = noise;
  if (solver)
  {
    j["solver"] = solver_to_json(*solver);
  }
  return j.dump(2) + "\n";
}

// ---- test points ----------------------------------------------------------

std::vector<TestPoint> parse_test_points(std::istream& in)
{
  CsvReader csv(in);
  csv.expect_header(kTestPointHeader);
  std::vector<TestPoint> points;
  std::vector<std::string> f;
  while (csv.next(f))
  {
    if (f.size() != 4)
    {
      csv.fail("expected 4 fields, got " + std::to_string(f.size()));
    }
    points.push_back(TestPoint{csv.text_field(f[0], "label"),
                               Point3(csv.number(f[1], "x_m"), csv.number(f[2], "y_m"), csv.number(f[3], "z_m"))});
  }
  return points;
}

std::vector<TestPoint> read_test_points(const std::filesystem::path& path)
{
  std::ifstream in = open_input(path);
  return parse_test_points(in);
}

void write_test_points(std::ostream& out, std::span<const TestPoint> points)
{
  out << kTestPointHeader << '\n';
  for (const auto& p : points)
  {
    check_csv_text(p.label);
    out << p.label << ',' << format_double(p.position.x()) << ',' << format_double(p.position.y()) << ','
        << format_double(p.position.z()) << '\n';
  }
}

// ---- measurements ---------------------------------------------------------

RecordedEpoch to_recorded(const Epoch& epoch, long long epoch_id)
{
  return RecordedEpoch{epoch_id, epoch.tp_label, epoch.toa, epoch.aoa};
}

void write_measurements(std::ostream& out, std::span<const RecordedEpoch> epochs)
{
  out << kMeasurementHeader << '\n';
  for (const auto& e : epochs)
  {
    check_csv_text(e.tp_label);
    for (const auto& m : e.toa)
    {
      check_csv_text(m.locator_id);
      out << e.epoch_id << ',' << e.tp_label << ',' << m.locator_id << ",toa," << format_double(m.toa_m)
          << ",,,,\n";
    }
    for (const auto& m : e.aoa)
    {
      check_csv_text(m.locator_id());
      const auto& u = m.direction_est().vec();
      out << e.epoch_id << ',' << e.tp_label << ',' << m.locator_id() << ",aoa,," << format_double(u.x()) << ','
          << format_double(u.y()) << ',' << format_double(u.z()) << ','
          << (m.concentration_override() ? format_double(*m.concentration_override()) : std::string()) << '\n';
    }
  }
}

std::vector<RecordedEpoch> parse_measurements(std::istream& in)
{
  CsvReader csv(in);
  csv.expect_header(kMeasurementHeader);
  std::vector<RecordedEpoch> epochs;
  std::map<long long, std::size_t> index;
  std::vector<std::string> f;
  while (csv.next(f))
  {
    if (f.size() != 9)
    {
      csv.fail("expected 9 fields, got " + std::to_string(f.size()));
    }
    const long long epoch_id = csv.integer(f[0], "epoch_id");
    const std::string& label = csv.text_field(f[1], "tp_label");
    const std::string& locator = csv.text_field(f[2], "locator_id");
    const std::string& type = csv.text_field(f[3], "type");

    auto [it, inserted] = index.try_emplace(epoch_id, epochs.size());
    if (inserted)
    {
      epochs.push_back(RecordedEpoch{epoch_id, label, {}, {}});
    }
    RecordedEpoch& epoch = epochs[it->second];
    if (epoch.tp_label != label)
    {
      csv.fail("epoch " + std::to_string(epoch_id) + " has conflicting tp_label '" + label + "'");
    }

    if (type == "toa")
    {
      epoch.toa.push_back(ToaMeasurement{locator, csv.number(f[4], "value_m")});
    }
    else if (type == "aoa")
    {
      const Eigen::Vector3d u(csv.number(f[5], "ux"), csv.number(f[6], "uy"), csv.number(f[7], "uz"));
      std::optional<double> kappa;
      if (!f[8].empty())
      {
        kappa = csv.number(f[8], "kappa");
      }
      try
      {
        epoch.aoa.emplace_back(locator, UnitVec3(u), kappa);
      }
      catch (const std::invalid_argument& e)
      {
        csv.fail(e.what());
      }
    }
    else
    {
      csv.fail("unknown measurement type '" + type + "'");
    }
  }
  return epochs;
}

// ---- records --------------------------------------------------------------

void write_records(std::ostream& out, std::span<const TrialRecord> records)
{
  out << kRecordHeader << '\n';
  for (const auto& r : records)
  {
    check_csv_text(r.tp_label);
    out << r.tp_label << ',' << r.epoch << ',' << to_string(r.algorithm) << ',';
    write_estimate_fields(out, r.est);
    out << ',' << format_double(r.horiz_err_m) << '\n';
  }
}

std::vector<TrialRecord> parse_records(std::istream& in)
{
  CsvReader csv(in);
  csv.expect_header(kRecordHeader);
  std::vector<TrialRecord> records;
  std::vector<std::string> f;
  while (csv.next(f))
  {
    if (f.size() != 12)
    {
      csv.fail("expected 12 fields, got " + std::to_string(f.size()));
    }
    TrialRecord r;
    r.tp_label = csv.text_field(f[0], "tp_label");
    r.epoch = static_cast<int>(csv.integer(f[1], "epoch"));
    try
    {
      r.algorithm = parse_algorithm(f[2]);
    }
    catch (const std::invalid_argument& e)
    {
      csv.fail(e.what());
    }
    r.est.position = Point3(csv.number(f[3], "x_m"), csv.number(f[4], "y_m"), csv.number(f[5], "z_m"));
    if (!f[6].empty())
    {
      r.est.tau = TransmitTime(csv.number(f[6], "tau_m"));
    }
    r.est.log_likelihood = csv.number(f[7], "log_likelihood");
    r.est.converged = csv.integer(f[8], "converged") != 0;
    r.est.iterations = static_cast<int>(csv.integer(f[9], "iterations"));
    r.est.start_index = static_cast<int>(csv.integer(f[10], "start_index"));
    r.horiz_err_m = csv.number(f[11], "horiz_err_m");
    records.push_back(std::move(r));
  }
  return records;
}

void write_estimates(std::ostream& out, std::span<const EstimateRow> rows)
{
  out << kEstimateHeader << '\n';
  for (const auto& r : rows)
  {
    check_csv_text(r.tp_label);
    out << r.epoch_id << ',' << r.tp_label << ',' << to_string(r.algorithm) << ',';
    write_estimate_fields(out, r.est);
    out << '\n';
  }
}

// ---- reports --------------------------------------------------------------

std::string summary_json(std::span<const TrialRecord> records, const std::set<Algorithm>& algorithms)
{
  json j = json::object();
  for (const Algorithm a : algorithms)
  {
    const auto errors = errors_for(records, a);
    if (!errors.empty())
    {
      j[std::string(to_string(a))] = stats_to_json(summarize(errors));
    }
  }
  return j.dump(2) + "\n";
}

std::string cdf_json(std::span<const TrialRecord> records, const std::set<Algorithm>& algorithms)
{
  json j = json::object();
  for (const Algorithm a : algorithms)
  {
    const auto errors = errors_for(records, a);
    if (!errors.empty())
    {
      j[std::string(to_string(a))] = cdf_to_json(error_cdf(errors));
    }
  }
  return j.dump() + "\n";
}

void write_per_tp(std::ostream& out, std::span<const PerTpRow> rows)
{
  out << "tp_label,algorithm,mean_m,std_m,count\n";
  for (const auto& r : rows)
  {
    check_csv_text(r.tp_label);
    out << r.tp_label << ',' << to_string(r.algorithm) << ',' << format_double(r.mean_m) << ','
        << format_double(r.std_m) << ',' << r.count << '\n';
  }
}

std::string sweep_json(std::span<const SweepPoint> sweep)
{
  json etas = json::array();
  json results = json::array();
  for (const auto& point : sweep)
  {
    etas.push_back(point.eta_m);
    json entry{{"eta_m", point.eta_m}};
    for (const Algorithm a : {Algorithm::ToaNls, Algorithm::Joint})
    {
      const auto errors = errors_for(point.records, a);
      if (!errors.empty())
      {
        entry[std::string(to_string(a))] =
            json{{"summary", stats_to_json(summarize(errors))}, {"cdf", cdf_to_json(error_cdf(errors))}};
      }
    }
    results.push_back(entry);
  }
  return json{{"eta_m", etas}, {"results", results}}.dump() + "\n";
}

void write_evaluation(const std::filesystem::path& dir, std::span<const TrialRecord> records,
                      const std::set<Algorithm>& algorithms)
{
  std::filesystem::create_directories(dir);
  {
    std::ofstream out = open_output(dir / "records.csv");
    write_records(out, records);
  }
  {
    std::ofstream out = open_output(dir / "summary.json");
    out << summary_json(records, algorithms);
  }
  {
    std::ofstream out = open_output(dir / "cdf.json");
    out << cdf_json(records, algorithms);
  }
  {
    std::ofstream out = open_output(dir / "per_tp.csv");
    write_per_tp(out, per_tp_stats(records));
  }
}

void write_sweep(const std::filesystem::path& dir, std::span<const SweepPoint> sweep)
{
  std::filesystem::create_directories(dir);
  {
    std::ofstream out = open_output(dir / "sweep.json");
    out << sweep_json(sweep);
  }
  std::ofstream out = open_output(dir / "sweep_summary.csv");
  out << "eta_m,algorithm,mean_m,rms_m,p50_m,p90_m,count\n";
  for (const auto& point : sweep)
  {
    for (const Algorithm a : {Algorithm::ToaNls, Algorithm::Joint})
    {
      const auto errors = errors_for(point.records, a);
      if (errors.empty())
      {
        continue;
      }
      const ErrorStats s = summarize(errors);
      out << format_double(point.eta_m) << ',' << to_string(a) << ',' << format_double(s.mean_m) << ','
          << format_double(s.rms_m) << ',' << format_double(s.p50_m) << ',' << format_double(s.p90_m) << ','
          << s.count << '\n';
    }
  }
}

} // namespace jointloc
