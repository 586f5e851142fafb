#include "bayesdoe/persistence.hpp"

#include <algorithm>
#include <filesystem>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include "bayesdoe/csv.hpp"
#include "bayesdoe/errors.hpp"
#include "json_codec.hpp"

namespace bayesdoe {

namespace detail {

json matrix_to_json(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index cols) {
  if (!j.is_array()) throw SchemaError("expected an array of rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw SchemaError("row " + std::to_string(r) + " should have " + std::to_string(cols) + " entries");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

json vector_to_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json space_to_json(const DesignSpace& space) {
  json vars = json::array();
  for (const auto& v : space.variables()) {
    json o{{"name", v.name}, {"lower", v.lower}, {"upper", v.upper}};
    if (!v.unit.empty()) o["unit"] = v.unit;
    vars.push_back(std::move(o));
  }
  return vars;
}

DesignSpace space_from_json(const json& j) {
  if (!j.is_array()) throw SchemaError("space must be an array of variables");
  std::vector<Variable> vars;
  for (const auto& o : j) {
    vars.push_back({o.at("name").get<std::string>(), o.at("lower").get<double>(), o.at("upper").get<double>(),
                    o.value("unit", std::string())});
  }
  try {
    return DesignSpace(std::move(vars));
  } catch (const ArgumentError& e) {
    throw ValidationError(std::string("space: ") + e.what());
  }
}

json column_to_json(const OutputColumn& c) {
  json o{{"name", c.name}, {"role", to_string(c.role)}};
  if (c.role == OutputRole::objective) {
    o["sense"] = to_string(c.sense);
  } else {
    o["threshold"] = c.threshold;
    o["direction"] = to_string(c.direction);
  }
  if (!c.unit.empty()) o["unit"] = c.unit;
  return o;
}

OutputColumn column_from_json(const json& j) {
  OutputColumn c;
  c.name = j.at("name").get<std::string>();
  c.role = parse_role(j.value("role", std::string("objective")));
  if (c.role == OutputRole::objective) {
    c.sense = parse_sense(j.value("sense", std::string("maximize")));
  } else {
    c.threshold = j.at("threshold").get<double>();
    c.direction = parse_direction(j.value("direction", std::string("le")));
  }
  c.unit = j.value("unit", std::string());
  return c;
}

json acquisition_to_json(const AcquisitionSpec& a) {
  return {{"kind", to_string(a.kind)},     {"beta", a.beta},     {"mc_samples", a.mc_samples},
          {"seed", a.seed},                {"weights", a.weights}, {"rho", a.rho},
          {"incumbent", to_string(a.incumbent)}};
}

AcquisitionSpec acquisition_from_json(const json& j) {
  AcquisitionSpec a;
  a.kind = parse_acquisition_kind(j.value("kind", to_string(a.kind)));
  a.beta = j.value("beta", a.beta);
  a.mc_samples = j.value("mc_samples", a.mc_samples);
  a.seed = j.value("seed", a.seed);
  a.weights = j.value("weights", a.weights);
  a.rho = j.value("rho", a.rho);
  a.incumbent = parse_incumbent_source(j.value("incumbent", to_string(a.incumbent)));
  return a;
}

namespace {

json interval_to_json(const Interval& i) { return json::array({i.lower, i.upper}); }

Interval interval_from_json(const json& j, Interval fallback) {
  if (j.is_null()) return fallback;
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

json settings_to_json(const CampaignSettings& s) {
  json fit{{"restarts", s.fit.restarts},
           {"seed", s.fit.seed},
           {"smoothness", to_string(s.fit.smoothness)},
           {"ard", s.fit.ard},
           {"max_iterations", s.fit.max_iterations},
           {"bounds",
            {{"length_scale", interval_to_json(s.fit.bounds.length_scale)},
             {"amplitude_sq", interval_to_json(s.fit.bounds.amplitude_sq)},
             {"noise_var", interval_to_json(s.fit.bounds.noise_var)}}}};
  json budget{{"candidates", s.budget.candidates},
              {"refinements", s.budget.refinements},
              {"max_local_steps", s.budget.max_local_steps},
              {"seed", s.budget.seed}};
  return {{"fit", fit},
          {"budget", budget},
          {"strategy", s.strategy ? json(to_string(*s.strategy)) : json(nullptr)},
          {"max_batch", s.max_batch},
          {"max_objectives", s.max_objectives},
          {"cold_start_fallback", s.cold_start_fallback},
          {"feasibility_bar", s.feasibility_bar}};
}

CampaignSettings settings_from_json(const json& j) {
  CampaignSettings s;
  if (j.contains("fit")) {
    const json& f = j["fit"];
    s.fit.restarts = f.value("restarts", s.fit.restarts);
    s.fit.seed = f.value("seed", s.fit.seed);
    s.fit.smoothness = parse_smoothness(f.value("smoothness", to_string(s.fit.smoothness)));
    s.fit.ard = f.value("ard", s.fit.ard);
    s.fit.max_iterations = f.value("max_iterations", s.fit.max_iterations);
    if (f.contains("bounds")) {
      const json& b = f["bounds"];
      s.fit.bounds.length_scale = interval_from_json(b.value("length_scale", json()), s.fit.bounds.length_scale);
      s.fit.bounds.amplitude_sq = interval_from_json(b.value("amplitude_sq", json()), s.fit.bounds.amplitude_sq);
      s.fit.bounds.noise_var = interval_from_json(b.value("noise_var", json()), s.fit.bounds.noise_var);
    }
  }
  if (j.contains("budget")) {
    const json& b = j["budget"];
    s.budget.candidates = b.value("candidates", s.budget.candidates);
    s.budget.refinements = b.value("refinements", s.budget.refinements);
    s.budget.max_local_steps = b.value("max_local_steps", s.budget.max_local_steps);
    s.budget.seed = b.value("seed", s.budget.seed);
  }
  if (j.contains("strategy") && !j["strategy"].is_null()) {
    s.strategy = parse_batch_strategy(j["strategy"].get<std::string>());
  }
  s.max_batch = j.value("max_batch", s.max_batch);
  s.max_objectives = j.value("max_objectives", s.max_objectives);
  s.cold_start_fallback = j.value("cold_start_fallback", s.cold_start_fallback);
  s.feasibility_bar = j.value("feasibility_bar", s.feasibility_bar);
  return s;
}

json event_to_json(const HistoryEvent& e) {
  json o{{"kind", e.kind}, {"revision", e.revision}, {"timestamp", e.timestamp}};
  if (!e.request_id.empty()) o["request_id"] = e.request_id;
  if (e.kind != "init") o["points"] = matrix_to_json(e.points);
  if (e.kind == "tell") o["outputs"] = matrix_to_json(e.outputs);
  return o;
}

HistoryEvent event_from_json(const json& j, Eigen::Index dim, Eigen::Index outputs) {
  HistoryEvent e;
  e.kind = j.at("kind").get<std::string>();
  e.revision = j.at("revision").get<long long>();
  e.timestamp = j.value("timestamp", std::string());
  e.request_id = j.value("request_id", std::string());
  if (j.contains("points")) e.points = matrix_from_json(j["points"], dim);
  if (j.contains("outputs")) e.outputs = matrix_from_json(j["outputs"], outputs);
  return e;
}

json state_to_json(const CampaignState& s) {
  json specs = json::array();
  for (const auto& c : s.data.columns()) specs.push_back(column_to_json(c));
  json history = json::array();
  for (const auto& e : s.history) history.push_back(event_to_json(e));
  return {{"schema_version", kSchemaVersion},
          {"space", space_to_json(s.space)},
          {"specs", specs},
          {"data", {{"points", matrix_to_json(s.data.points())}, {"outputs", matrix_to_json(s.data.outputs())}}},
          {"acquisition", acquisition_to_json(s.acquisition)},
          {"settings", settings_to_json(s.settings)},
          {"pending", matrix_to_json(s.pending)},
          {"history", history},
          {"seed", s.seed},
          {"revision", s.revision}};
}

CampaignState state_from_json(const json& j, const std::function<void(const std::string&)>& warn) {
  if (!j.is_object()) throw SchemaError("campaign document must be a JSON object");
  if (!j.contains("schema_version")) throw MigrationError("campaign document has no schema_version");
  const int version = j["schema_version"].get<int>();
  if (version != kSchemaVersion) {
    throw MigrationError("campaign schema_version " + std::to_string(version) +
                         " is not supported; this build reads schema_version " + std::to_string(kSchemaVersion));
  }
  static const char* known[] = {"schema_version", "space", "specs", "data", "acquisition",
                                "settings", "pending", "history", "seed", "revision"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known) && warn) {
      warn("ignoring unknown campaign field '" + key + "'");
    }
  }
  CampaignState s;
  s.space = space_from_json(j.at("space"));
  std::vector<OutputColumn> columns;
  for (const auto& c : j.at("specs")) columns.push_back(column_from_json(c));
  const auto dim = static_cast<Eigen::Index>(s.space.dim());
  const auto m = static_cast<Eigen::Index>(columns.size());
  const json& data = j.at("data");
  s.data = Dataset(matrix_from_json(data.at("points"), dim), matrix_from_json(data.at("outputs"), m), columns);
  s.acquisition = acquisition_from_json(j.at("acquisition"));
  s.settings = settings_from_json(j.value("settings", json::object()));
  s.pending = matrix_from_json(j.value("pending", json::array()), dim);
  for (const auto& e : j.value("history", json::array())) s.history.push_back(event_from_json(e, dim, m));
  s.seed = j.at("seed").get<std::uint64_t>();
  s.revision = j.at("revision").get<long long>();
  return s;
}

json kernel_to_json(const KernelParams& k) {
  return {{"amplitude_sq", k.amplitude_sq},
          {"length_scales", std::vector<double>(k.length_scales.data(), k.length_scales.data() + k.length_scales.size())},
          {"smoothness", to_string(k.smoothness)}};
}

json posterior_to_json(const Posterior& p) {
  return {{"mean", p.mean}, {"variance", p.variance}, {"extrapolated", p.extrapolated}};
}

}  // namespace detail

std::string save_campaign(const CampaignState& state) {
  return detail::state_to_json(state).dump(2) + "\n";
}

CampaignState load_campaign(std::string_view document, const WarningSink& warn) {
  return detail::translate_json_errors(
      [&] { return detail::state_from_json(detail::json::parse(document), warn); });
}

CampaignState read_campaign(const std::string& path, const WarningSink& warn) {
  return load_campaign(read_file(path), warn);
}

namespace {

class FileLock {
 public:
  explicit FileLock(const std::string& path) : fd_(::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644)) {
    if (fd_ < 0) throw ArgumentError("cannot open lock file '" + path + "'");
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw ArgumentError("cannot lock '" + path + "'");
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_;
};

std::optional<long long> current_revision(const std::string& path) {
  if (!std::filesystem::exists(path)) return std::nullopt;
  return detail::translate_json_errors([&] {
    const auto j = detail::json::parse(read_file(path));
    return j.at("revision").get<long long>();
  });
}

}  // namespace

void write_campaign(const std::string& path, const CampaignState& state,
                    std::optional<long long> expected_revision) {
  const std::string text = save_campaign(state);
  FileLock lock(path + ".lock");
  if (expected_revision) {
    const long long current = current_revision(path).value_or(kNoCampaign);
    if (current != *expected_revision) {
      throw ConflictError("campaign '" + path + "' is at revision " + std::to_string(current) +
                              ", expected " + std::to_string(*expected_revision),
                          current);
    }
  }
  write_file_atomic(path, text);
}

SpaceDocument parse_space_document(std::string_view document) {
  return detail::translate_json_errors([&] {
    const auto j = detail::json::parse(document);
    if (!j.is_object()) throw SchemaError("space document must be a JSON object");
    SpaceDocument doc;
    doc.space = detail::space_from_json(j.at("variables"));
    if (j.contains("outputs")) {
      for (const auto& c : j["outputs"]) doc.outputs.push_back(detail::column_from_json(c));
    }
    if (j.contains("acquisition")) doc.acquisition = detail::acquisition_from_json(j["acquisition"]);
    return doc;
  });
}

}  // namespace bayesdoe
