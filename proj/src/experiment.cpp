#include "cqcd/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cqcd/errors.hpp"

namespace cqcd {
namespace {

using nlohmann::json;

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    std::ostringstream msg;
    msg << "config: " << key << ": " << what;
    const auto line = line_of(key);
    if (line) msg << " (line " << *line << ")";
    throw ConfigError(msg.str());
  }

  void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) fail(where, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items()) {
      if (!ok.count(key)) fail(where.empty() ? key : where + "." + key, "unknown key");
    }
  }

  const json& require(const json& obj, const std::string& where, const char* key) const {
    if (!obj.contains(key)) fail(where.empty() ? key : where + "." + key, "missing required key");
    return obj.at(key);
  }

  double number(const json& v, const std::string& key) const {
    if (!v.is_number()) fail(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(key, "expected a finite number");
    return d;
  }

  std::uint64_t count(const json& v, const std::string& key) const {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    fail(key, "expected a nonnegative integer");
  }

  std::string string(const json& v, const std::string& key) const {
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

 private:
  // Line of the first occurrence of the key's last component, if any.
  std::optional<std::size_t> line_of(const std::string& key) const {
    const auto dot = key.rfind('.');
    const std::string needle = "\"" + (dot == std::string::npos ? key : key.substr(dot + 1)) + "\"";
    const auto pos = text_.find(needle);
    if (pos == std::string_view::npos) return std::nullopt;
    return 1 + static_cast<std::size_t>(std::count(text_.begin(), text_.begin() + pos, '\n'));
  }

  std::string_view text_;
};

AdversarySchedule::Family parse_family(const Reader& r, const std::string& s) {
  if (s == "gaussian_mean") return AdversarySchedule::Family::GaussianMean;
  if (s == "gaussian_variance") return AdversarySchedule::Family::GaussianVariance;
  if (s == "exponential_rate") return AdversarySchedule::Family::ExponentialRate;
  r.fail("schedule.family", "expected gaussian_mean, gaussian_variance or exponential_rate, got \"" + s + "\"");
}

}  // namespace

McConfig ExperimentSpec::mc_at(double gamma) const {
  McConfig cfg = mc;
  if (cfg.cap == 0) cfg.cap = static_cast<std::uint64_t>(std::ceil(100.0 * gamma));
  return cfg;
}

bool operator==(const ExperimentSpec& a, const ExperimentSpec& b) {
  return a.name == b.name && a.schedule == b.schedule && a.gammas == b.gammas &&
         a.mc.replications == b.mc.replications && a.mc.seed == b.mc.seed && a.mc.cap == b.mc.cap &&
         a.mc.workers == b.mc.workers && a.outputs == b.outputs && a.rho == b.rho && a.validation == b.validation;
}

ExperimentSpec parse_experiment(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + byte, '\n');
    const auto last_nl = text.substr(0, byte).rfind('\n');
    const auto column = byte - (last_nl == std::string_view::npos ? 0 : last_nl + 1) + 1;
    std::ostringstream msg;
    msg << "config: syntax error at line " << line << ", column " << column << ": " << e.what();
    throw ConfigError(msg.str());
  }

  const Reader r(text);
  r.only_keys(doc, "", {"name", "schedule", "gammas", "mc", "outputs", "rho", "validation"});
  ExperimentSpec spec;

  spec.name = r.string(r.require(doc, "", "name"), "name");
  static const std::regex name_re("[a-z0-9_-]+");
  if (!std::regex_match(spec.name, name_re)) r.fail("name", "must match [a-z0-9_-]+, got \"" + spec.name + "\"");

  const json& sched = r.require(doc, "", "schedule");
  r.only_keys(sched, "schedule", {"family", "c", "delta", "sign", "lambda"});
  spec.schedule.family = parse_family(r, r.string(r.require(sched, "schedule", "family"), "schedule.family"));
  spec.schedule.c = r.number(r.require(sched, "schedule", "c"), "schedule.c");
  spec.schedule.delta = r.number(r.require(sched, "schedule", "delta"), "schedule.delta");
  if (spec.schedule.family != AdversarySchedule::Family::ExponentialRate) {
    for (const char* key : {"sign", "lambda"}) {
      if (sched.contains(key)) r.fail(std::string("schedule.") + key, "applies to exponential_rate only");
    }
  }
  if (sched.contains("sign")) {
    const json& s = sched.at("sign");
    if (!s.is_number_integer() || (s.get<int>() != 1 && s.get<int>() != -1)) r.fail("schedule.sign", "expected 1 or -1");
    spec.schedule.sign = s.get<int>();
  }
  if (sched.contains("lambda")) spec.schedule.lambda = r.number(sched.at("lambda"), "schedule.lambda");
  try {
    spec.schedule.validate();
  } catch (const ParameterError& e) {
    r.fail("schedule", e.what());
  }

  const json& gammas = r.require(doc, "", "gammas");
  if (!gammas.is_array()) r.fail("gammas", "expected an array of numbers");
  if (gammas.empty()) r.fail("gammas", "must be nonempty");
  for (const auto& g : gammas) spec.gammas.push_back(r.number(g, "gammas"));
  for (std::size_t i = 0; i < spec.gammas.size(); ++i) {
    if (!(spec.gammas[i] > 1.0)) r.fail("gammas", "every gamma must exceed 1");
    if (i > 0 && !(spec.gammas[i] > spec.gammas[i - 1])) r.fail("gammas", "must be strictly increasing");
  }

  spec.mc.cap = 0;
  if (doc.contains("mc")) {
    const json& mc = doc.at("mc");
    r.only_keys(mc, "mc", {"replications", "seed", "cap", "workers"});
    if (mc.contains("replications")) spec.mc.replications = r.count(mc.at("replications"), "mc.replications");
    if (mc.contains("seed")) spec.mc.seed = r.count(mc.at("seed"), "mc.seed");
    if (mc.contains("cap")) spec.mc.cap = r.count(mc.at("cap"), "mc.cap");
    if (mc.contains("workers")) {
      const auto w = r.count(mc.at("workers"), "mc.workers");
      if (w == 0 || w > 1024) r.fail("mc.workers", "must lie in [1, 1024]");
      spec.mc.workers = static_cast<unsigned>(w);
    }
  }
  if (spec.mc.replications < 2) r.fail("mc.replications", "must be >= 2");

  if (doc.contains("outputs")) spec.outputs = r.string(doc.at("outputs"), "outputs");
  if (doc.contains("rho")) {
    const double rho = r.number(doc.at("rho"), "rho");
    if (!(rho > 0.0 && rho < 1.0)) r.fail("rho", "must lie in (0, 1)");
    spec.rho = rho;
  }
  if (doc.contains("validation")) {
    const json& v = doc.at("validation");
    r.only_keys(v, "validation", {"calibration_tol", "at2fa_tol", "add_tol"});
    auto tol = [&](const char* key, double& out) {
      if (!v.contains(key)) return;
      out = r.number(v.at(key), std::string("validation.") + key);
      if (!(out > 0.0)) r.fail(std::string("validation.") + key, "must be positive");
    };
    tol("calibration_tol", spec.validation.calibration_tol);
    tol("at2fa_tol", spec.validation.at2fa_tol);
    tol("add_tol", spec.validation.add_tol);
    if (!(spec.validation.calibration_tol < 0.5)) r.fail("validation.calibration_tol", "must be < 0.5");
  }
  return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment(buf.str());
}

std::string emit_experiment(const ExperimentSpec& spec) {
  json doc = json::object();
  doc["name"] = spec.name;
  json sched = {{"family", to_string(spec.schedule.family)}, {"c", spec.schedule.c}, {"delta", spec.schedule.delta}};
  if (spec.schedule.family == AdversarySchedule::Family::ExponentialRate) {
    sched["sign"] = spec.schedule.sign;
    sched["lambda"] = spec.schedule.lambda;
  }
  doc["schedule"] = sched;
  doc["gammas"] = spec.gammas;
  doc["mc"] = {{"replications", spec.mc.replications},
               {"seed", spec.mc.seed},
               {"cap", spec.mc.cap},
               {"workers", spec.mc.workers}};
  doc["outputs"] = spec.outputs;
  if (spec.rho) doc["rho"] = *spec.rho;
  doc["validation"] = {{"calibration_tol", spec.validation.calibration_tol},
                       {"at2fa_tol", spec.validation.at2fa_tol},
                       {"add_tol", spec.validation.add_tol}};
  return doc.dump(2) + "\n";
}

}  // namespace cqcd
