#include "wcstlab/service/pipeline_config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <fmt/format.h>

#include "wcstlab/errors.hpp"

namespace wcst::service {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("pipeline config: " + msg); }

std::string join_path(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

const json& object_at(const json& parent, const std::string& key, const std::string& path) {
  static const json empty = json::object();
  if (!parent.contains(key)) return empty;
  const auto& v = parent.at(key);
  if (!v.is_object()) fail(fmt::format("{} must be an object", join_path(path, key)));
  return v;
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
  for (const auto& [k, v] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      fail(fmt::format("unknown key '{}'", join_path(path, k)));
    }
  }
}

template <typename T>
void read(const json& obj, const std::string& path, const std::string& key, T& out) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  const auto name = join_path(path, key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) fail(fmt::format("{} must be a boolean", name));
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) fail(fmt::format("{} must be a string", name));
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) fail(fmt::format("{} must be a number", name));
  } else if constexpr (std::is_unsigned_v<T>) {
    if (!v.is_number_unsigned()) fail(fmt::format("{} must be a non-negative integer", name));
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) fail(fmt::format("{} must be an integer", name));
  }
  out = v.get<T>();
}

}  // namespace

std::vector<signal::BandDef> PipelineConfig::effective_bands() const {
  if (!bands.empty()) return bands;
  const auto c = signal::canonical_bands();
  return {c.begin(), c.end()};
}

std::string PipelineConfig::resolve(const std::string& path) const {
  const std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

void PipelineConfig::validate() const {
  if (participants.size() < 2) {
    fail(fmt::format("participants: the group cluster test needs at least 2 (got {})", participants.size()));
  }
  std::vector<std::string> ids;
  for (const auto& p : participants) {
    if (p.id.empty() || p.header.empty() || p.log.empty()) fail("participants: every entry needs id, header and log");
    if (std::find(ids.begin(), ids.end(), p.id) != ids.end()) fail(fmt::format("participants: duplicate id '{}'", p.id));
    ids.push_back(p.id);
  }
  if (output_dir.empty()) fail("output_dir must not be empty");
  if (notch.enabled) {
    if (!(notch.line_freq > 0.0)) fail("notch.line_freq must be > 0");
    if (!(notch.window_s > 0.0)) fail("notch.window_s must be > 0");
    if (!(notch.overlap >= 0.0 && notch.overlap < 1.0)) fail("notch.overlap must be in [0, 1)");
    if (notch.max_freq && !(*notch.max_freq >= notch.line_freq)) fail("notch.max_freq must be >= notch.line_freq");
  }
  if (!(bandpass.lo > 0.0 && bandpass.lo < bandpass.hi)) {
    fail(fmt::format("bandpass: need 0 < lo < hi (got {}-{} Hz)", bandpass.lo, bandpass.hi));
  }
  if (bandpass.order < 1) fail("bandpass.order must be >= 1");
  if (ica.enabled) {
    if (!(ica.variance_target > 0.0 && ica.variance_target <= 1.0)) fail("ica.variance_target must be in (0, 1]");
    if (!(ica.r_threshold >= 0.0)) fail("ica.r_threshold must be >= 0");
    if (!(ica.tolerance > 0.0)) fail("ica.tolerance must be > 0");
    if (ica.max_iterations < 1) fail("ica.max_iterations must be >= 1");
    if (ica.fit_decimation < 1) fail("ica.fit_decimation must be >= 1");
  }
  std::vector<std::string> names;
  for (const auto& b : effective_bands()) {
    if (b.name.empty()) fail("bands: every band needs a name");
    if (b.name == "broadband") fail("bands: 'broadband' is reserved");
    if (std::find(names.begin(), names.end(), b.name) != names.end()) fail(fmt::format("bands: duplicate '{}'", b.name));
    names.push_back(b.name);
    if (!(b.lo > 0.0 && b.lo < b.hi)) fail(fmt::format("bands.{}: need 0 < lo < hi (got {}-{} Hz)", b.name, b.lo, b.hi));
  }
  if (!(epoch.tmin < 0.0 && epoch.tmax > 0.0)) fail("epoch: need tmin < 0 < tmax");
  const auto [a, b] = epoch.conditions;
  if (a == b) fail("epoch.conditions must name two different conditions");
  const bool stim = epoch.lock == erp::Lock::Stimulus;
  for (auto c : {a, b}) {
    const bool stim_cond = c == erp::Condition::Conf || c == erp::Condition::Search;
    if (stim != stim_cond) {
      fail(fmt::format("epoch.conditions: {} is not available for {}-locked epochs", erp::to_string(c),
                       erp::to_string(epoch.lock)));
    }
  }
  if (cluster.n_permutations < 1) fail("cluster.n_permutations must be >= 1");
  if (!(cluster.cluster_alpha > 0.0 && cluster.cluster_alpha < 1.0)) fail("cluster.cluster_alpha must be in (0, 1)");
  if (!(cluster.report_alpha > 0.0 && cluster.report_alpha <= 1.0)) fail("cluster.report_alpha must be in (0, 1]");
  if (!(cluster.adjacency_threshold >= 0.0)) fail("cluster.adjacency_threshold must be >= 0");
  if (!(topo.width_s > 0.0 && topo.start_s < topo.end_s)) fail("topo: need width_s > 0 and start_s < end_s");
  if (topo.start_s < epoch.tmin || topo.end_s > epoch.tmax) fail("topo range must lie inside the epoch window");
}

void PipelineConfig::validate_for_rate(double fs) const {
  const double nyquist = fs / 2.0;
  if (notch.enabled && !(notch.line_freq < nyquist)) {
    fail(fmt::format("notch.line_freq {} Hz must be below fs/2 = {} Hz", notch.line_freq, nyquist));
  }
  if (notch.enabled && notch.window_s * fs < 2.0 * fs / notch.line_freq) {
    fail("notch.window_s must span at least two line periods");
  }
  if (!(bandpass.hi < nyquist)) fail(fmt::format("bandpass.hi {} Hz must be below fs/2 = {} Hz", bandpass.hi, nyquist));
  for (const auto& b : effective_bands()) {
    if (!(b.hi < nyquist)) fail(fmt::format("bands.{}: hi {} Hz must be below fs/2 = {} Hz", b.name, b.hi, nyquist));
  }
}

nlohmann::ordered_json PipelineConfig::to_json() const {
  nlohmann::ordered_json j;
  auto parts = nlohmann::ordered_json::array();
  for (const auto& p : participants) parts.push_back({{"id", p.id}, {"header", p.header}, {"log", p.log}});
  j["participants"] = std::move(parts);
  j["output_dir"] = output_dir;
  j["eog_channels"] = eog_channels;
  j["log_offset_s"] = log_offset_s;
  j["rereference"] = rereference;
  nlohmann::ordered_json n;
  n["enabled"] = notch.enabled;
  n["line_freq"] = notch.line_freq;
  n["max_freq"] = notch.max_freq ? nlohmann::ordered_json(*notch.max_freq) : nlohmann::ordered_json(nullptr);
  n["window_s"] = notch.window_s;
  n["overlap"] = notch.overlap;
  j["notch"] = std::move(n);
  j["bandpass"] = {{"lo", bandpass.lo}, {"hi", bandpass.hi}, {"order", bandpass.order}};
  nlohmann::ordered_json i;
  i["enabled"] = ica.enabled;
  i["variance_target"] = ica.variance_target;
  i["r_threshold"] = ica.r_threshold;
  i["seed"] = ica.seed;
  i["tolerance"] = ica.tolerance;
  i["max_iterations"] = ica.max_iterations;
  i["fit_decimation"] = ica.fit_decimation;
  j["ica"] = std::move(i);
  auto bl = nlohmann::ordered_json::array();
  for (const auto& b : effective_bands()) {
    nlohmann::ordered_json e;
    e["name"] = b.name;
    e["lo"] = b.lo;
    e["hi"] = b.hi;
    bl.push_back(std::move(e));
  }
  j["bands"] = std::move(bl);
  nlohmann::ordered_json ep;
  ep["lock"] = erp::to_string(epoch.lock);
  ep["tmin"] = epoch.tmin;
  ep["tmax"] = epoch.tmax;
  ep["conditions"] = {erp::to_string(epoch.conditions[0]), erp::to_string(epoch.conditions[1])};
  ep["balance_seed"] = epoch.balance_seed;
  j["epoch"] = std::move(ep);
  nlohmann::ordered_json cl;
  cl["n_permutations"] = cluster.n_permutations;
  cl["cluster_alpha"] = cluster.cluster_alpha;
  cl["report_alpha"] = cluster.report_alpha;
  cl["seed"] = cluster.seed;
  cl["adjacency_threshold"] = cluster.adjacency_threshold;
  j["cluster"] = std::move(cl);
  nlohmann::ordered_json t;
  t["start_s"] = topo.start_s;
  t["end_s"] = topo.end_s;
  t["width_s"] = topo.width_s;
  j["topo"] = std::move(t);
  return j;
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& doc, std::string base_dir) {
  if (!doc.is_object()) fail("document must be a JSON object");
  check_keys(doc, "",
             {"$schema", "participants", "output_dir", "eog_channels", "log_offset_s", "rereference", "notch", "bandpass",
              "ica", "bands", "epoch", "cluster", "topo"});
  PipelineConfig c;
  c.base_dir = std::move(base_dir);

  if (!doc.contains("participants") || !doc.at("participants").is_array()) fail("participants must be an array");
  for (const auto& p : doc.at("participants")) {
    if (!p.is_object()) fail("participants entries must be objects");
    check_keys(p, "participants[]", {"id", "header", "log"});
    ParticipantInput in;
    read(p, "participants[]", "id", in.id);
    read(p, "participants[]", "header", in.header);
    read(p, "participants[]", "log", in.log);
    c.participants.push_back(std::move(in));
  }
  read(doc, "", "output_dir", c.output_dir);
  if (doc.contains("eog_channels")) {
    const auto& e = doc.at("eog_channels");
    if (!e.is_array() || !std::all_of(e.begin(), e.end(), [](const json& v) { return v.is_string(); })) {
      fail("eog_channels must be an array of strings");
    }
    c.eog_channels = e.get<std::vector<std::string>>();
  }
  read(doc, "", "log_offset_s", c.log_offset_s);
  read(doc, "", "rereference", c.rereference);

  const auto& n = object_at(doc, "notch", "");
  check_keys(n, "notch", {"enabled", "line_freq", "max_freq", "window_s", "overlap"});
  read(n, "notch", "enabled", c.notch.enabled);
  read(n, "notch", "line_freq", c.notch.line_freq);
  if (n.contains("max_freq") && !n.at("max_freq").is_null()) {
    double v = 0.0;
    read(n, "notch", "max_freq", v);
    c.notch.max_freq = v;
  }
  read(n, "notch", "window_s", c.notch.window_s);
  read(n, "notch", "overlap", c.notch.overlap);

  const auto& bp = object_at(doc, "bandpass", "");
  check_keys(bp, "bandpass", {"lo", "hi", "order"});
  read(bp, "bandpass", "lo", c.bandpass.lo);
  read(bp, "bandpass", "hi", c.bandpass.hi);
  read(bp, "bandpass", "order", c.bandpass.order);

  const auto& ic = object_at(doc, "ica", "");
  check_keys(ic, "ica",
             {"enabled", "variance_target", "r_threshold", "seed", "tolerance", "max_iterations", "fit_decimation"});
  read(ic, "ica", "enabled", c.ica.enabled);
  read(ic, "ica", "variance_target", c.ica.variance_target);
  read(ic, "ica", "r_threshold", c.ica.r_threshold);
  read(ic, "ica", "seed", c.ica.seed);
  read(ic, "ica", "tolerance", c.ica.tolerance);
  read(ic, "ica", "max_iterations", c.ica.max_iterations);
  read(ic, "ica", "fit_decimation", c.ica.fit_decimation);

  if (doc.contains("bands")) {
    if (!doc.at("bands").is_array()) fail("bands must be an array");
    for (const auto& b : doc.at("bands")) {
      if (!b.is_object()) fail("bands entries must be objects");
      check_keys(b, "bands[]", {"name", "lo", "hi"});
      signal::BandDef def;
      read(b, "bands[]", "name", def.name);
      read(b, "bands[]", "lo", def.lo);
      read(b, "bands[]", "hi", def.hi);
      c.bands.push_back(std::move(def));
    }
  }

  const auto& ep = object_at(doc, "epoch", "");
  check_keys(ep, "epoch", {"lock", "tmin", "tmax", "conditions", "balance_seed"});
  try {
    if (ep.contains("lock")) {
      std::string lock;
      read(ep, "epoch", "lock", lock);
      c.epoch.lock = erp::lock_from_string(lock);
    }
    if (ep.contains("conditions")) {
      const auto& cs = ep.at("conditions");
      if (!cs.is_array() || cs.size() != 2 || !cs[0].is_string() || !cs[1].is_string()) {
        fail("epoch.conditions must be an array of two condition names");
      }
      c.epoch.conditions = {erp::condition_from_string(cs[0].get<std::string>()),
                            erp::condition_from_string(cs[1].get<std::string>())};
    } else if (c.epoch.lock == erp::Lock::Feedback) {
      c.epoch.conditions = {erp::Condition::Cor, erp::Condition::Inc};
    }
  } catch (const InputError& e) {
    fail(e.what());
  }
  read(ep, "epoch", "tmin", c.epoch.tmin);
  read(ep, "epoch", "tmax", c.epoch.tmax);
  read(ep, "epoch", "balance_seed", c.epoch.balance_seed);

  const auto& cl = object_at(doc, "cluster", "");
  check_keys(cl, "cluster", {"n_permutations", "cluster_alpha", "report_alpha", "seed", "adjacency_threshold"});
  read(cl, "cluster", "n_permutations", c.cluster.n_permutations);
  read(cl, "cluster", "cluster_alpha", c.cluster.cluster_alpha);
  read(cl, "cluster", "report_alpha", c.cluster.report_alpha);
  read(cl, "cluster", "seed", c.cluster.seed);
  read(cl, "cluster", "adjacency_threshold", c.cluster.adjacency_threshold);

  const auto& tp = object_at(doc, "topo", "");
  check_keys(tp, "topo", {"start_s", "end_s", "width_s"});
  read(tp, "topo", "start_s", c.topo.start_s);
  read(tp, "topo", "end_s", c.topo.end_s);
  read(tp, "topo", "width_s", c.topo.width_s);

  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open pipeline config '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  json doc;
  try {
    doc = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("pipeline config '{}' is not valid JSON: {}", path, e.what()));
  }
  return from_json(doc, std::filesystem::path(path).parent_path().string());
}

}  // namespace wcst::service
