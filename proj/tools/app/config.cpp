#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace cwmeas::app {
namespace {

struct Entry {
  std::string value;
  int line;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries)
      : entries_(std::move(entries)) {}

  [[nodiscard]] const Entry* find(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  template <class T>
  bool read(const std::string& key, T& target) const {
    const Entry* e = find(key);
    if (e != nullptr) target = convert<T>(key, *e, e->value);
    return e != nullptr;
  }
  template <class T>
  bool read(const std::string& key, std::optional<T>& target) const {
    const Entry* e = find(key);
    if (e != nullptr) target = convert<T>(key, *e, e->value);
    return e != nullptr;
  }
  template <class T>
  void read_list(const std::string& key, std::vector<T>& target) const {
    const Entry* e = find(key);
    if (e == nullptr) return;
    target.clear();
    for (auto item : split_list(e->value)) {
      target.push_back(convert<T>(key, *e, item));
    }
  }

  template <class T>
  static T convert(const std::string& key, const Entry& e,
                   std::string_view text) {
    T value{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(),
                                     value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() ||
        text.empty()) {
      throw ParseError("line " + std::to_string(e.line) + ": key '" + key +
                       "': cannot parse '" + std::string(text) + "'");
    }
    return value;
  }

 private:
  std::map<std::string, Entry> entries_;
};

Sector parse_sector(const std::string& key, const Entry& e) {
  if (e.value == "+1" || e.value == "1" || e.value == "up") return Sector::Up;
  if (e.value == "-1" || e.value == "down") return Sector::Down;
  throw ParseError("line " + std::to_string(e.line) + ": key '" + key +
                   "': expected +1 or -1");
}

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::FreeEnergy:
      return "free-energy";
    case Scenario::CriticalCoupling:
      return "critical-coupling";
    case Scenario::Dephase:
      return "dephase";
    case Scenario::Register:
      return "register";
    case Scenario::Measure:
      return "measure";
    case Scenario::OracleCheck:
      return "oracle-check";
  }
  return "unknown";
}

Scenario parse_scenario(std::string_view name) {
  for (auto s : {Scenario::FreeEnergy, Scenario::CriticalCoupling,
                 Scenario::Dephase, Scenario::Register, Scenario::Measure,
                 Scenario::OracleCheck}) {
    if (name == to_string(s)) return s;
  }
  throw ValidationError("unknown scenario '" + std::string(name) + "'");
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "scenario",
      "model.N", "model.J", "model.T", "model.gamma", "model.Gamma",
      "model.g", "model.n", "model.b_x", "model.theta",
      "rho0.bloch", "rho0.r_uu", "rho0.r_ud_re", "rho0.r_ud_im",
      "schedule.t_couple", "schedule.t_relax", "schedule.dt",
      "schedule.snapshot_every",
      "classify.m_threshold",
      "sampling.n_runs", "sampling.seed",
      "output.dir",
      "free_energy.g_values", "free_energy.grid_size", "free_energy.sector",
      "critical_coupling.T_values",
      "dephase.t_max", "dephase.points",
      "oracle.N", "oracle.t_end", "oracle.dt", "oracle.sample_every",
      "oracle.enumeration_N", "oracle.time_points"};
  return keys;
}

ScenarioConfig parse_config(std::string_view text) {
  std::map<std::string, Entry> entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ParseError("line " + std::to_string(line_no) + ": unknown key '" +
                       key + "'");
    }
    if (!entries.emplace(key, Entry{value, line_no}).second) {
      throw ParseError("line " + std::to_string(line_no) + ": key '" + key +
                       "' given twice");
    }
  }

  const Reader in(std::move(entries));
  ScenarioConfig cfg;
  if (const auto* e = in.find("scenario")) cfg.scenario = parse_scenario(e->value);

  in.read("model.N", cfg.params.N);
  in.read("model.J", cfg.params.J);
  in.read("model.T", cfg.params.T);
  in.read("model.gamma", cfg.params.gamma);
  in.read("model.Gamma", cfg.params.Gamma);
  in.read("model.g", cfg.params.g);
  in.read("model.n", cfg.params.n);
  in.read("model.b_x", cfg.params.b_x);
  in.read("model.theta", cfg.theta);

  std::vector<std::string> bad;
  for (const auto& name : cfg.params.violations()) bad.push_back("model." + name);
  if (cfg.theta && !(*cfg.theta > 0.0)) bad.emplace_back("model.theta");

  std::optional<double> r_uu, re, im;
  std::vector<double> bloch;
  in.read_list("rho0.bloch", bloch);
  in.read("rho0.r_uu", r_uu);
  in.read("rho0.r_ud_re", re);
  in.read("rho0.r_ud_im", im);
  try {
    if (!bloch.empty()) {
      if (r_uu || re || im) {
        throw ValidationError("give either rho0.bloch or rho0.r_uu/r_ud");
      }
      if (bloch.size() != 3) throw ValidationError("rho0.bloch needs 3 values");
      cfg.rho0 = SpinDensityMatrix::from_bloch({bloch[0], bloch[1], bloch[2]});
    } else if (r_uu || re || im) {
      cfg.rho0 = SpinDensityMatrix::from_elements(
          r_uu.value_or(0.5), Complex(re.value_or(0.0), im.value_or(0.0)));
    }
  } catch (const ValidationError&) {
    bad.emplace_back("rho0");
  }

  // The schedule defaults only need N, J and gamma; an unrelated bad field
  // should not also be reported as three bad schedule entries.
  const auto& mp = cfg.params;
  const bool defaults_ok = mp.N >= 1 && mp.J > 0.0 && mp.gamma > 0.0;
  if (defaults_ok) cfg.schedule = Schedule::defaults_for(mp);
  const bool set_tc = in.read("schedule.t_couple", cfg.schedule.t_couple);
  const bool set_tr = in.read("schedule.t_relax", cfg.schedule.t_relax);
  const bool set_dt = in.read("schedule.dt", cfg.schedule.dt);
  in.read("schedule.snapshot_every", cfg.snapshot_every);
  const auto check = [&](bool set, double v, const char* key) {
    if ((defaults_ok || set) && !(v > 0.0)) bad.emplace_back(key);
  };
  check(set_tc, cfg.schedule.t_couple, "schedule.t_couple");
  check(set_tr, cfg.schedule.t_relax, "schedule.t_relax");
  check(set_dt, cfg.schedule.dt, "schedule.dt");
  if (cfg.snapshot_every && !(*cfg.snapshot_every > 0.0)) {
    bad.emplace_back("schedule.snapshot_every");
  }

  in.read("classify.m_threshold", cfg.m_threshold);
  if (cfg.m_threshold && !(*cfg.m_threshold > 0.0 && *cfg.m_threshold < 1.0)) {
    bad.emplace_back("classify.m_threshold");
  }

  in.read("sampling.n_runs", cfg.n_runs);
  in.read("sampling.seed", cfg.seed);
  if (cfg.n_runs < 1) bad.emplace_back("sampling.n_runs");
  if (const auto* e = in.find("output.dir")) cfg.output_dir = e->value;

  in.read_list("free_energy.g_values", cfg.free_energy.g_values);
  in.read("free_energy.grid_size", cfg.free_energy.grid_size);
  if (const auto* e = in.find("free_energy.sector")) {
    cfg.free_energy.sector = parse_sector("free_energy.sector", *e);
  }
  if (cfg.free_energy.g_values.empty() ||
      std::any_of(cfg.free_energy.g_values.begin(),
                  cfg.free_energy.g_values.end(),
                  [](double g) { return !(g >= 0.0); })) {
    bad.emplace_back("free_energy.g_values");
  }
  if (cfg.free_energy.grid_size < 3) bad.emplace_back("free_energy.grid_size");

  in.read_list("critical_coupling.T_values", cfg.critical_T);
  if (cfg.critical_T.empty()) cfg.critical_T = {cfg.params.T};
  if (std::any_of(cfg.critical_T.begin(), cfg.critical_T.end(),
                  [](double T) { return !(T > 0.0); })) {
    bad.emplace_back("critical_coupling.T_values");
  }

  in.read("dephase.t_max", cfg.dephase.t_max);
  in.read("dephase.points", cfg.dephase.points);
  if (cfg.dephase.t_max && !(*cfg.dephase.t_max > 0.0)) {
    bad.emplace_back("dephase.t_max");
  }
  if (cfg.dephase.points < 2) bad.emplace_back("dephase.points");

  in.read("oracle.N", cfg.oracle.N);
  in.read("oracle.t_end", cfg.oracle.t_end);
  in.read("oracle.dt", cfg.oracle.dt);
  in.read("oracle.sample_every", cfg.oracle.sample_every);
  in.read_list("oracle.enumeration_N", cfg.oracle.enumeration_N);
  in.read("oracle.time_points", cfg.oracle.time_points);
  if (cfg.oracle.N < 1 || cfg.oracle.N > 12) bad.emplace_back("oracle.N");
  if (cfg.oracle.t_end && !(*cfg.oracle.t_end >= 0.0)) {
    bad.emplace_back("oracle.t_end");
  }
  if (!(cfg.oracle.dt > 0.0)) bad.emplace_back("oracle.dt");
  if (cfg.oracle.sample_every < 1) bad.emplace_back("oracle.sample_every");
  if (std::any_of(cfg.oracle.enumeration_N.begin(),
                  cfg.oracle.enumeration_N.end(),
                  [](int n) { return n < 1 || n > 20; })) {
    bad.emplace_back("oracle.enumeration_N");
  }
  if (cfg.oracle.time_points < 2) bad.emplace_back("oracle.time_points");

  if (!bad.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& b : bad) msg += " " + b;
    throw ValidationError(msg);
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace cwmeas::app
