#include "scenario.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>

#include "cwmeas/csv.hpp"
#include "cwmeas/dephasing.hpp"
#include "cwmeas/oracle.hpp"

namespace cwmeas::app {
namespace {

std::string num(double v) { return csv::format_double(v); }

// Shortest round-trip form, for file names.
std::string short_num(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

class Runner {
 public:
  Runner(const ScenarioConfig& cfg, const RunOptions& opts, ScenarioResult& out)
      : cfg_(cfg), opts_(opts), out_(out) {}

  void run(Scenario s) {
    std::filesystem::create_directories(cfg_.output_dir);
    put("version", kVersion);
    put("scenario", to_string(s));
    echo_parameters();
    key_scalars();
    switch (s) {
      case Scenario::FreeEnergy:
        free_energy();
        break;
      case Scenario::CriticalCoupling:
        critical();
        break;
      case Scenario::Dephase:
        dephase();
        break;
      case Scenario::Register:
        reg();
        break;
      case Scenario::Measure:
        measure();
        break;
      case Scenario::OracleCheck:
        oracle_check();
        break;
    }
  }

 private:
  void put(std::string key, std::string value) {
    out_.summary.emplace_back(std::move(key), std::move(value));
  }

  void write(const csv::Table& table, const std::string& name) {
    const auto path = cfg_.output_dir / name;
    csv::emit_csv(table, path);
    out_.files.push_back(path);
  }

  [[nodiscard]] double theta() const {
    return cfg_.theta.value_or(default_bath_time(cfg_.params.gamma, cfg_.params.T));
  }

  void echo_parameters() {
    const auto& p = cfg_.params;
    put("model.N", std::to_string(p.N));
    put("model.J", num(p.J));
    put("model.T", num(p.T));
    put("model.gamma", num(p.gamma));
    put("model.Gamma", num(p.Gamma));
    put("model.g", num(p.g));
    put("model.n", std::to_string(p.n));
    put("model.b_x", num(p.b_x));
    put("model.theta", num(theta()));
    put("rho0.r_uu", num(cfg_.rho0.r_uu()));
    put("rho0.r_ud_re", num(cfg_.rho0.r_ud().real()));
    put("rho0.r_ud_im", num(cfg_.rho0.r_ud().imag()));
    put("schedule.t_couple", num(cfg_.schedule.t_couple));
    put("schedule.t_relax", num(cfg_.schedule.t_relax));
    put("schedule.dt", num(cfg_.schedule.dt));
    put("sampling.n_runs", std::to_string(cfg_.n_runs));
    put("sampling.seed", std::to_string(cfg_.seed));
  }

  void key_scalars() {
    const auto& p = cfg_.params;
    if (p.g > 0.0) {
      const DephasingModel d({p.N, p.g, p.n, theta()});
      put("tau", num(d.gaussian_time()));
      put("t_1", num(d.first_recurrence()));
    } else {
      put("tau", "n/a");
      put("t_1", "n/a");
    }
    try {
      put("g_c", num(critical_coupling(p.T, p.J)));
    } catch (const PhaseError&) {
      put("g_c", "n/a");
    }
    try {
      put("m_F", num(ferromagnetic_magnetization({p.T, 0.0, Sector::Up, p.J})));
    } catch (const PhaseError&) {
      put("m_F", "n/a");
    }
  }

  void free_energy() {
    const auto& fe = cfg_.free_energy;
    for (double g : fe.g_values) {
      const Landscape land{cfg_.params.T, g, fe.sector, cfg_.params.J};
      const auto curve = export_curve(land, fe.grid_size);
      const std::string name = "free_energy_g" + short_num(g) + ".csv";
      csv::Table table({"m", "F_per_spin"});
      table.comments.push_back("T=" + num(curve.T) + ",g=" + num(curve.g) +
                               ",s=" + to_string(curve.s));
      for (std::size_t i = 0; i < curve.m_grid.size(); ++i) {
        table.add_row({curve.m_grid[i], curve.f_values[i]});
      }
      write(table, name);

      std::string minima, maxima;
      for (const auto& sp : stationary_points(land)) {
        auto& list = sp.kind == StationaryKind::Minimum ? minima : maxima;
        if (!list.empty()) list += ";";
        list += num(sp.m);
      }
      const std::string prefix = "g=" + short_num(g) + ".";
      put(prefix + "file", name);
      put(prefix + "minima", minima.empty() ? "none" : minima);
      put(prefix + "maxima", maxima.empty() ? "none" : maxima);
      put(prefix + "barrier", has_barrier_toward_positive(land) ? "yes" : "no");
    }
  }

  void critical() {
    csv::Table table({"T", "m_star", "g_c"});
    for (double T : cfg_.critical_T) {
      table.add_row({T, inflection_magnetization(T, cfg_.params.J),
                     critical_coupling(T, cfg_.params.J)});
      put("g_c(T=" + short_num(T) + ")", num(critical_coupling(T, cfg_.params.J)));
    }
    write(table, "critical_coupling.csv");
  }

  void dephase() {
    const auto& p = cfg_.params;
    const DephasingModel single({p.N, p.g, 1, theta()});
    const double t_max = cfg_.dephase.t_max.value_or(1.25 * single.first_recurrence());
    write(single.trace(uniform_times(t_max, cfg_.dephase.points)), "dephasing.csv");
    put("t_B", num(single.bath_onset_time()));
    put("recurrences_suppressed", single.recurrences_suppressed() ? "yes" : "no");
    put("damped_at_t_1", num(std::abs(single.damped_truncation_factor(
                             single.first_recurrence()))));
    put("correlation_peak_t(k=1)", num(single.correlation_peak_time(1)));
    put("correlation_peak(k=1)",
        num(single.correlation_cascade(1, single.correlation_peak_time(1))));
    if (p.n > 1) {
      const DephasingModel collective({p.N, p.g, p.n, theta()});
      put("characteristic_time(n)", num(collective.characteristic_time()));
    }
  }

  void reg() {
    const auto& p = cfg_.params;
    const double interval =
        cfg_.snapshot_every.value_or(cfg_.schedule.t_couple / 20.0);
    std::array<csv::Table, 2> snaps{csv::Table({"t", "m", "p"}),
                                    csv::Table({"t", "m", "p"})};
    std::array<double, 2> next{0.0, 0.0};
    const auto add_snapshot = [&](Sector s, double t, std::span<const double> prob) {
      auto& table = snaps[s == Sector::Up ? 0 : 1];
      for (int i = 0; i <= p.N; ++i) table.add_row({t, lattice_m(p.N, i), prob[i]});
    };
    const auto ready = initial_distribution(p);
    add_snapshot(Sector::Up, 0.0, ready.p());
    add_snapshot(Sector::Down, 0.0, ready.p());
    next = {interval, interval};
    const double t_end = cfg_.schedule.t_couple + cfg_.schedule.t_relax;

    MeasurementOptions mopts;
    mopts.theta = theta();
    mopts.m_threshold = cfg_.m_threshold;
    mopts.observer = [&](Sector s, double t, std::span<const double> prob) {
      double& due = next[s == Sector::Up ? 0 : 1];
      const double eps = 1e-9 * interval;
      if (t >= due - eps || std::abs(t - t_end) <= eps) {
        add_snapshot(s, t, prob);
        while (due <= t + eps) due += interval;
      }
    };
    const auto outcome = run_measurement(cfg_.rho0, p, cfg_.schedule, mopts);
    write(snaps[0], "snapshots_up.csv");
    write(snaps[1], "snapshots_down.csv");

    put("m_threshold", num(outcome.m_threshold));
    put("off_diagonal_weight", num(outcome.off_diagonal_weight));
    for (const auto* sec : {&outcome.up, &outcome.down}) {
      const std::string prefix = "sector" + to_string(sec->sector) + ".";
      put(prefix + "weight", num(sec->weight));
      put(prefix + "mean_m_at_decoupling", num(sec->at_decoupling.mean()));
      put(prefix + "mean_m", num(sec->mean_m));
      put(prefix + "status", to_string(sec->classification.status));
      put(prefix + "pointer", sec->classification.pointer
                                  ? to_string(*sec->classification.pointer)
                                  : "none");
      put(prefix + "dissipated_F", num(sec->dissipated_free_energy));
      put(prefix + "mass", num(sec->final_dist.total_mass()));
    }
  }

  void measure() {
    SamplingOptions sopts;
    sopts.threads = opts_.threads;
    sopts.m_threshold = cfg_.m_threshold;
    const auto result = sample_trajectories(cfg_.rho0, cfg_.params, cfg_.schedule,
                                            cfg_.n_runs, cfg_.seed, sopts);
    write(records_table(result.records), "records.csv");
    const auto& c = result.counts;
    const double total = static_cast<double>(c.total());
    csv::Table counts({"outcome", "count", "fraction"});
    const std::array<std::pair<const char*, std::uint64_t>, 4> rows{
        {{"Registered(+1)", c.registered_up},
         {"Registered(-1)", c.registered_down},
         {"Relaxed", c.relaxed},
         {"Undecided", c.undecided}}};
    for (const auto& [name, count] : rows) {
      counts.add_row({std::string(name), static_cast<std::int64_t>(count),
                      static_cast<double>(count) / total});
      put(std::string("fraction.") + name, num(static_cast<double>(count) / total));
    }
    write(counts, "counts.csv");
    put("born.expected_up", num(cfg_.rho0.r_uu()));
    put("born.expected_down", num(cfg_.rho0.r_dd()));
  }

  void oracle_check() {
    const auto& p = cfg_.params;
    if (!(p.g > 0.0)) throw ValidationError("oracle-check requires model.g > 0");
    const double t_1 = std::numbers::pi / p.g;
    csv::Table table({"N", "t", "closed_form", "enumerated", "enumerated_quartic"});
    double worst = 0.0;
    for (int N : cfg_.oracle.enumeration_N) {
      const DephasingModel d({N, p.g, 1, std::nullopt});
      for (double t : uniform_times(t_1, cfg_.oracle.time_points)) {
        const double closed = d.truncation_factor(t);
        const double plain = oracle::enumerate_truncation_factor(N, p.g, t, false, p.J);
        const double quartic = oracle::enumerate_truncation_factor(N, p.g, t, true, p.J);
        worst = std::max({worst, std::abs(plain - closed), std::abs(quartic - closed)});
        table.add_row({static_cast<std::int64_t>(N), t, closed, plain, quartic});
      }
    }
    write(table, "oracle_truncation.csv");
    put("oracle.max_abs_diff", num(worst));

    const oracle::NonidealParams np{cfg_.oracle.N, p.g, p.b_x, p.J, true};
    const double t_end = cfg_.oracle.t_end.value_or(10.0 / p.g);
    const auto traj = oracle::evolve_nonideal(np, cfg_.rho0, t_end, cfg_.oracle.dt,
                                              cfg_.oracle.sample_every);
    write(traj.table(), "nonideal.csv");
    put("nonideal.max_delta",
        num(*std::max_element(traj.delta.begin(), traj.delta.end())));
    put("nonideal.max_norm_drift", num(traj.max_norm_drift));

    if (worst > 1e-12) {
      throw GuardError("oracle mismatch: max |enumerated - closed form| = " +
                       num(worst));
    }
  }

  const ScenarioConfig& cfg_;
  const RunOptions& opts_;
  ScenarioResult& out_;
};

void write_summary(const ScenarioConfig& cfg, ScenarioResult& result) {
  const auto path = cfg.output_dir / "summary.txt";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  for (const auto& [k, v] : result.summary) out << k << " = " << v << '\n';
  if (result.exit_code != kExitOk) out << "error = " << result.message << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
  result.files.push_back(path);
}

}  // namespace

std::string ScenarioResult::get(const std::string& key) const {
  for (const auto& [k, v] : summary) {
    if (k == key) return v;
  }
  return {};
}

ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  ScenarioResult result;
  if (!config.scenario) {
    result.exit_code = kExitValidation;
    result.message = "no scenario selected";
    return result;
  }
  try {
    Runner(config, options, result).run(*config.scenario);
  } catch (const IoError& e) {
    result.exit_code = kExitIo;
    result.message = e.what();
    return result;
  } catch (const std::filesystem::filesystem_error& e) {
    result.exit_code = kExitIo;
    result.message = e.what();
    return result;
  } catch (const GuardError& e) {
    result.exit_code = kExitGuard;
    result.message = e.what();
  } catch (const PhaseError& e) {
    result.exit_code = kExitGuard;
    result.message = e.what();
  } catch (const ValidationError& e) {
    result.exit_code = kExitValidation;
    result.message = e.what();
  } catch (const DomainError& e) {
    result.exit_code = kExitValidation;
    result.message = e.what();
  } catch (const ConfigurationError& e) {
    result.exit_code = kExitValidation;
    result.message = e.what();
  }
  try {
    write_summary(config, result);
  } catch (const IoError& e) {
    result.exit_code = kExitIo;
    result.message = e.what();
  }
  return result;
}

}  // namespace cwmeas::app
