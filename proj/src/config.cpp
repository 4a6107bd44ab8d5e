#include "relbandit/config.hpp"

#include "relbandit/dataset.hpp"
#include "relbandit/errors.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace relbandit {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      // SimulationConfig / EnvironmentConfig
      "iterations_per_user", "num_runs", "base_seed", "candidate_arm_count", "noise_sigma", "budget_scale",
      "log_base", "report_mode", "jobs",
      // AgentConfig
      "agents", "lambda", "lambda_tilde", "alpha", "alpha_tilde", "sigma", "sharing", "linucb_alpha",
      // run locations and manifest metadata
      "dataset", "out", "config", "tool_version", "timestamp"};
  return keys;
}

double to_real(const std::string& key, const std::string& v) {
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(d))
    throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  return d;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  char* end = nullptr;
  errno = 0;
  const unsigned long long u = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || v[0] == '-' || end != v.c_str() + v.size() || errno == ERANGE)
    throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + v + "'");
  return u;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

}  // namespace

ConfigMap parse_config(const std::string& text) {
  ConfigMap map;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(n) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (!known_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");
    map[key] = trim(line.substr(eq + 1));
  }
  return map;
}

ConfigMap read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

RunSettings resolve_settings(const ConfigMap& map) {
  for (const auto& [key, value] : map)
    if (!known_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");

  RunSettings s;
  auto& sim = s.sim;
  auto get = [&](const char* key) -> const std::string* {
    const auto it = map.find(key);
    return it == map.end() ? nullptr : &it->second;
  };

  if (auto* v = get("iterations_per_user")) sim.iterations_per_user = to_uint("iterations_per_user", *v);
  if (auto* v = get("num_runs")) sim.num_runs = to_uint("num_runs", *v);
  if (auto* v = get("base_seed")) sim.base_seed = to_uint("base_seed", *v);
  if (auto* v = get("candidate_arm_count")) sim.environment.candidate_arm_count = to_uint("candidate_arm_count", *v);
  if (auto* v = get("noise_sigma")) sim.environment.noise_sigma = to_real("noise_sigma", *v);
  if (auto* v = get("budget_scale")) sim.environment.budget_scale = to_real("budget_scale", *v);
  if (auto* v = get("log_base")) sim.environment.log_base = to_real("log_base", *v);
  if (auto* v = get("jobs")) sim.jobs = to_uint("jobs", *v);
  if (auto* v = get("report_mode")) {
    if (*v == "expected") sim.report_mode = RegretMode::Expected;
    else if (*v == "realized") sim.report_mode = RegretMode::Realized;
    else throw ConfigError("config key 'report_mode': expected 'expected' or 'realized', got '" + *v + "'");
  }
  if (auto* v = get("dataset")) s.dataset = *v;
  if (auto* v = get("out")) s.out = *v;
  if (auto* v = get("linucb_alpha")) s.linucb_alpha = to_real("linucb_alpha", *v);

  AgentConfig shared;
  if (auto* v = get("lambda")) shared.lambda = to_real("lambda", *v);
  if (auto* v = get("lambda_tilde")) shared.lambda_tilde = to_real("lambda_tilde", *v);
  if (auto* v = get("alpha")) shared.alpha = to_real("alpha", *v);
  if (auto* v = get("alpha_tilde")) shared.alpha_tilde = to_real("alpha_tilde", *v);
  if (auto* v = get("sigma")) shared.sigma = to_real("sigma", *v);
  if (auto* v = get("sharing")) shared.sharing = to_bool("sharing", *v);

  if (!(shared.lambda > 0.0 && shared.lambda <= 1.0)) throw ConfigError("config key 'lambda': must lie in (0, 1]");
  if (!(shared.lambda_tilde > 0.0)) throw ConfigError("config key 'lambda_tilde': must be positive");
  if (!(sim.environment.noise_sigma >= 0.0)) throw ConfigError("config key 'noise_sigma': must be non-negative");
  if (!(sim.environment.budget_scale >= 0.0)) throw ConfigError("config key 'budget_scale': must be non-negative");
  if (sim.environment.log_base != 0.0 && !(sim.environment.log_base > 1.0))
    throw ConfigError("config key 'log_base': must exceed 1 (0 selects the natural log)");
  if (sim.iterations_per_user == 0) throw ConfigError("config key 'iterations_per_user': must be positive");
  if (sim.num_runs == 0) throw ConfigError("config key 'num_runs': must be positive");
  if (sim.environment.candidate_arm_count == 0) throw ConfigError("config key 'candidate_arm_count': must be positive");

  std::string agents = "linucb,conucb,pos,posneg,diff,diff_fast";
  if (auto* v = get("agents")) agents = *v;
  std::istringstream list(agents);
  std::string name;
  while (std::getline(list, name, ',')) {
    name = trim(name);
    if (name.empty()) continue;
    bool share = shared.sharing;
    constexpr std::string_view suffix = "+share";
    if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      share = true;
      name.resize(name.size() - suffix.size());
    }
    Variant variant;
    try {
      variant = parse_variant(name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("config key 'agents': " + std::string(e.what()));
    }
    AgentConfig cfg = shared;
    cfg.variant = variant;
    cfg.sharing = share && variant != Variant::LinUCB && variant != Variant::Oracle;
    if (variant == Variant::LinUCB) {
      cfg.lambda = 1.0;
      cfg.alpha = s.linucb_alpha;
    }
    sim.agents.push_back(cfg);
  }
  if (sim.agents.empty()) throw ConfigError("config key 'agents': no agents listed");
  return s;
}

std::string render_settings(const RunSettings& s) {
  const auto& sim = s.sim;
  std::ostringstream out;
  out << "iterations_per_user = " << sim.iterations_per_user << '\n'
      << "num_runs = " << sim.num_runs << '\n'
      << "base_seed = " << sim.base_seed << '\n'
      << "candidate_arm_count = " << sim.environment.candidate_arm_count << '\n'
      << "noise_sigma = " << format_double(sim.environment.noise_sigma) << '\n'
      << "budget_scale = " << format_double(sim.environment.budget_scale) << '\n'
      << "log_base = " << format_double(sim.environment.log_base) << '\n'
      << "report_mode = " << (sim.report_mode == RegretMode::Expected ? "expected" : "realized") << '\n'
      << "jobs = " << sim.jobs << '\n';
  out << "agents = ";
  // Conversational hyper-parameters are shared; take them from the first
  // non-LinUCB agent.
  AgentConfig shared;
  bool have_shared = false;
  for (std::size_t i = 0; i < sim.agents.size(); ++i) {
    const auto& a = sim.agents[i];
    out << (i ? "," : "") << agent_label(a);
    if (!have_shared && a.variant != Variant::LinUCB) {
      shared = a;
      have_shared = true;
    }
  }
  out << '\n'
      << "lambda = " << format_double(shared.lambda) << '\n'
      << "lambda_tilde = " << format_double(shared.lambda_tilde) << '\n'
      << "alpha = " << format_double(shared.alpha) << '\n'
      << "alpha_tilde = " << format_double(shared.alpha_tilde) << '\n'
      << "sigma = " << format_double(shared.sigma) << '\n'
      << "sharing = false\n"
      << "linucb_alpha = " << format_double(s.linucb_alpha) << '\n';
  if (!s.dataset.empty()) out << "dataset = " << s.dataset << '\n';
  if (!s.out.empty()) out << "out = " << s.out << '\n';
  return out.str();
}

}  // namespace relbandit
