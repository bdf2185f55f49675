#include "icsig/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <thread>

namespace icsig {

namespace {

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::fixed_awgn_2user: return "fixed-awgn-2user";
    case Scenario::fixed_awgn_3user: return "fixed-awgn-3user";
    case Scenario::cellular_2cell: return "cellular-2cell";
    case Scenario::cellular_3cell: return "cellular-3cell";
    case Scenario::rayleigh: return "rayleigh";
  }
  return "?";
}

Scenario parse_scenario(const std::string& s) {
  for (Scenario sc : {Scenario::fixed_awgn_2user, Scenario::fixed_awgn_3user,
                      Scenario::cellular_2cell, Scenario::cellular_3cell,
                      Scenario::rayleigh})
    if (s == scenario_name(sc)) return sc;
  throw ConfigError("unknown scenario '" + s + "'", "scenario");
}

int scenario_users(Scenario s, int rayleigh_users) {
  switch (s) {
    case Scenario::fixed_awgn_2user:
    case Scenario::cellular_2cell: return 2;
    case Scenario::fixed_awgn_3user:
    case Scenario::cellular_3cell: return 3;
    case Scenario::rayleigh: return rayleigh_users;
  }
  return 1;
}

}  // namespace

const std::vector<std::string>& known_schemes() {
  static const std::vector<std::string> schemes = {
      "ps-pc",     "minsum-mse", "minmax-mse", "minil-ia",
      "maxsinr-ia", "minmax-pep", "minmax-ser"};
  return schemes;
}

Eigen::MatrixXcd fixed_awgn_matrix(int users) {
  using namespace std::complex_literals;
  auto entry = [](double mag, double phase) { return std::polar(mag, phase); };
  if (users == 2) {
    Eigen::MatrixXcd h(2, 2);
    h << entry(1.9310, -2.0228), entry(0.7732, 0.5865),
         entry(0.9249, 3.0213), entry(2.3742, 0.2089);
    return h;
  }
  if (users == 3) {
    Eigen::MatrixXcd h(3, 3);
    h << entry(1.9310, -2.0228), entry(0.7732, 0.5865), entry(0.9766, 1.1907),
         entry(0.9249, 3.0213), entry(2.3742, 0.2089), entry(0.3009, -1.5307),
         entry(1.7628, -0.4282), entry(0.3127, -1.4959), entry(2.1935, 1.7364);
    return h;
  }
  throw ConfigError("fixed AWGN matrices exist for 2 or 3 users only", "scenario");
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j) {
  ExperimentSpec spec;
  try {
    spec.scenario = parse_scenario(j.at("scenario").get<std::string>());
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("missing or non-string value", "scenario");
  }
  if (j.contains("task")) {
    const std::string t = j["task"].get<std::string>();
    if (t == "ser-sweep") spec.task = TaskKind::ser_sweep;
    else if (t == "pep-validation") spec.task = TaskKind::pep_validation;
    else throw ConfigError("unknown task '" + t + "'", "task");
  }
  spec.users = scenario_users(spec.scenario, j.value("users", 1));
  if (spec.users < 1) throw ConfigError("must be at least 1", "users");

  if (!j.contains("modulations") || !j["modulations"].is_array())
    throw ConfigError("array of per-user labels required", "modulations");
  spec.modulations = j["modulations"].get<std::vector<std::string>>();
  if (static_cast<int>(spec.modulations.size()) != spec.users)
    throw ConfigError("need exactly one label per user (" +
                          std::to_string(spec.users) + ")",
                      "modulations");
  for (const std::string& m : spec.modulations) build_constellation(m);  // validates

  const char* grid_field = spec.grid_is_power() ? "tx_power_dbm" : "snr_db";
  if (!j.contains(grid_field) || !j[grid_field].is_array() || j[grid_field].empty())
    throw ConfigError("non-empty numeric array required", grid_field);
  spec.grid_db = j[grid_field].get<std::vector<double>>();

  if (spec.task == TaskKind::pep_validation) {
    spec.snr2_db = j.value("snr2_db", std::vector<double>{10.0});
    if (spec.snr2_db.empty()) throw ConfigError("must be non-empty", "snr2_db");
    spec.interference = InterferenceModel::gaussian;
  } else {
    if (!j.contains("schemes") || !j["schemes"].is_array() || j["schemes"].empty())
      throw ConfigError("non-empty array required", "schemes");
    spec.schemes = j["schemes"].get<std::vector<std::string>>();
    for (const std::string& s : spec.schemes)
      if (std::find(known_schemes().begin(), known_schemes().end(), s) ==
          known_schemes().end())
        throw ConfigError("unknown scheme '" + s + "'", "schemes");
  }

  spec.n_symbols = j.value("n_symbols", 100000L);
  if (spec.n_symbols < 1) throw ConfigError("must be positive", "n_symbols");
  spec.n_realizations = j.value("n_realizations", 1);
  if (spec.n_realizations < 1) throw ConfigError("must be positive", "n_realizations");
  spec.seed = j.value("seed", 1ULL);
  spec.output = j.value("output", std::string("results.csv"));

  if (j.contains("interference")) {
    const std::string m = j["interference"].get<std::string>();
    if (m == "constellation") spec.interference = InterferenceModel::constellation;
    else if (m == "gaussian") spec.interference = InterferenceModel::gaussian;
    else throw ConfigError("must be 'constellation' or 'gaussian'", "interference");
  }
  if (j.contains("ser_prefactor")) {
    const std::string m = j["ser_prefactor"].get<std::string>();
    if (m == "paper") spec.ser_prefactor = SerPrefactor::paper;
    else if (m == "conventional") spec.ser_prefactor = SerPrefactor::conventional;
    else throw ConfigError("must be 'paper' or 'conventional'", "ser_prefactor");
  }
  spec.ps_pc_grid = j.value("ps_pc_grid", 50);
  if (spec.ps_pc_grid < 1) throw ConfigError("must be positive", "ps_pc_grid");
  return spec;
}

nlohmann::json ExperimentSpec::to_json() const {
  nlohmann::json j;
  j["scenario"] = scenario_name(scenario);
  j["task"] = task == TaskKind::ser_sweep ? "ser-sweep" : "pep-validation";
  j["users"] = users;
  j["modulations"] = modulations;
  j[grid_is_power() ? "tx_power_dbm" : "snr_db"] = grid_db;
  if (task == TaskKind::pep_validation) j["snr2_db"] = snr2_db;
  j["schemes"] = schemes;
  j["n_symbols"] = n_symbols;
  j["n_realizations"] = n_realizations;
  j["seed"] = seed;
  j["output"] = output;
  j["interference"] =
      interference == InterferenceModel::constellation ? "constellation" : "gaussian";
  j["ser_prefactor"] = ser_prefactor == SerPrefactor::paper ? "paper" : "conventional";
  j["ps_pc_grid"] = ps_pc_grid;
  return j;
}

std::uint64_t ExperimentSpec::config_hash() const {
  const std::string dump = to_json().dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

SchemeOutput design_scheme(const ChannelRealization& ch,
                           const std::vector<Constellation>& constellations,
                           const std::string& scheme, const ExperimentSpec& spec) {
  if (scheme == "minmax-pep" || scheme == "minmax-ser") {
    const AlternatingResult ar = scheme == "minmax-pep"
                                     ? minmax_pep(ch, constellations)
                                     : minmax_ser(ch, constellations);
    SchemeOutput out;
    out.scheme = scheme;
    out.detector = DetectorType::whitened_euclidean;
    out.precoders = ar.precoders;
    for (int k = 0; k < ch.users; ++k)
      out.receivers.push_back(noise_covariance(ch, ar.precoders, k).inv_sqrt);
    out.history = ar.history;
    out.degraded = ar.degraded;
    return out;
  }
  if (scheme == "ps-pc")
    return ps_pc(ch, constellations, spec.ps_pc_grid, spec.ser_prefactor);
  if (scheme == "minsum-mse") return minsum_mse(ch);
  if (scheme == "minmax-mse") return minmax_mse(ch);
  if (scheme == "minil-ia") return min_il_ia(ch);
  if (scheme == "maxsinr-ia") return max_sinr_ia(ch);
  throw ConfigError("unknown scheme '" + scheme + "'", "schemes");
}

void parallel_for(int n_tasks, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, n_tasks));
  if (jobs == 1) {
    for (int i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int w = 0; w < jobs; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n_tasks) return;
        fn(i);
      }
    });
  for (auto& t : pool) t.join();
}

namespace {

ChannelRealization build_channel(const ExperimentSpec& spec, double grid_value,
                                 int realization) {
  switch (spec.scenario) {
    case Scenario::fixed_awgn_2user:
    case Scenario::fixed_awgn_3user: {
      ChannelRealization ch = fixed_channel(fixed_awgn_matrix(spec.users));
      set_equal_snr_db(ch, grid_value);
      return ch;
    }
    case Scenario::rayleigh: {
      Rng rng = derive_stream(spec.seed, 101, realization);
      ChannelRealization ch = rayleigh_channel(spec.users, rng);
      set_equal_snr_db(ch, grid_value);
      return ch;
    }
    case Scenario::cellular_2cell:
    case Scenario::cellular_3cell: {
      Rng rng = derive_stream(spec.seed, 101, realization);
      return cellular_channel(spec.scenario == Scenario::cellular_2cell
                                  ? CellGeometry::two_cell
                                  : CellGeometry::three_cell,
                              grid_value, rng);
    }
  }
  throw ConfigError("unreachable scenario");
}

double report_snr_db(const ExperimentSpec& spec, double grid_value) {
  if (!spec.grid_is_power()) return grid_value;
  return mean_direct_snr_db(spec.scenario == Scenario::cellular_2cell
                                ? CellGeometry::two_cell
                                : CellGeometry::three_cell,
                            grid_value);
}

struct CellStats {
  double sum_max_ser = 0.0;
  long pooled_errors = 0;
  long pooled_symbols = 0;
  int realizations = 0;
  bool failed = false;
};

SweepResult run_ser_sweep(const ExperimentSpec& spec, int jobs) {
  SweepResult result;
  const int n_points = static_cast<int>(spec.grid_db.size());
  const int n_schemes = static_cast<int>(spec.schemes.size());
  const int n_tasks = n_points * spec.n_realizations;

  std::vector<Constellation> constellations;
  for (const std::string& m : spec.modulations)
    constellations.push_back(build_constellation(m));

  // per (point, scheme, realization): stats filled by the pool
  std::vector<CellStats> cells(static_cast<std::size_t>(n_points) * n_schemes);
  std::vector<std::mutex> locks(cells.size());

  parallel_for(n_tasks, jobs, [&](int task) {
    const int point = task / spec.n_realizations;
    const int realization = task % spec.n_realizations;
    const ChannelRealization ch = build_channel(spec, spec.grid_db[point], realization);
    for (int s = 0; s < n_schemes; ++s) {
      CellStats local;
      local.realizations = 1;
      try {
        const SchemeOutput design = design_scheme(ch, constellations, spec.schemes[s], spec);
        Rng rng = derive_stream(spec.seed, 202, point, realization, s);
        const SimResult sim = simulate_ser(ch, design, constellations, spec.n_symbols,
                                           rng, spec.interference);
        local.sum_max_ser = sim.max_ser;
        const int worst_user = static_cast<int>(
            std::max_element(sim.per_user_ser.begin(), sim.per_user_ser.end()) -
            sim.per_user_ser.begin());
        local.pooled_errors = sim.error_counts[worst_user];
        local.pooled_symbols = sim.symbols_simulated;
      } catch (const std::exception&) {
        local.failed = true;
      }
      CellStats& cell = cells[static_cast<std::size_t>(point) * n_schemes + s];
      std::lock_guard<std::mutex> guard(locks[static_cast<std::size_t>(point) * n_schemes + s]);
      cell.sum_max_ser += local.sum_max_ser;
      cell.pooled_errors += local.pooled_errors;
      cell.pooled_symbols += local.pooled_symbols;
      cell.realizations += local.realizations;
      cell.failed = cell.failed || local.failed;
    }
  });

  const std::uint64_t hash = spec.config_hash();
  for (int point = 0; point < n_points; ++point)
    for (int s = 0; s < n_schemes; ++s) {
      const CellStats& cell = cells[static_cast<std::size_t>(point) * n_schemes + s];
      SweepRow row;
      row.snr_db = report_snr_db(spec, spec.grid_db[point]);
      row.scheme = spec.schemes[s];
      row.n_realizations = cell.realizations;
      row.n_symbols = spec.n_symbols;
      row.failed = cell.failed;
      row.config_hash = hash;
      if (cell.failed) {
        row.mean_max_ser = row.ci_low = row.ci_high =
            std::numeric_limits<double>::quiet_NaN();
        ++result.failures;
      } else {
        row.mean_max_ser = cell.sum_max_ser / cell.realizations;
        const Interval iv = wilson_interval(cell.pooled_errors, cell.pooled_symbols);
        row.ci_low = iv.low;
        row.ci_high = iv.high;
      }
      result.rows.push_back(std::move(row));
    }
  return result;
}

SweepResult run_pep_validation(const ExperimentSpec& spec, int jobs) {
  SweepResult result;
  if (spec.users < 2)
    throw ConfigError("pep-validation needs at least two users", "users");
  const int n_points = static_cast<int>(spec.grid_db.size());
  const int n_levels = static_cast<int>(spec.snr2_db.size());
  const int n_tasks = n_points * spec.n_realizations;

  std::vector<Constellation> constellations;
  for (const std::string& m : spec.modulations)
    constellations.push_back(build_constellation(m));

  struct PepCell {
    double sum_analytic = 0.0;
    double sum_sim = 0.0;
    long pooled_errors = 0;
    long pooled_trials = 0;
    int realizations = 0;
  };
  std::vector<PepCell> cells(static_cast<std::size_t>(n_points) * n_levels);
  std::vector<std::mutex> locks(cells.size());

  parallel_for(n_tasks, jobs, [&](int task) {
    const int point = task / spec.n_realizations;
    const int realization = task % spec.n_realizations;
    Rng chan_rng = derive_stream(spec.seed, 101, realization);
    ChannelRealization ch = rayleigh_channel(spec.users, chan_rng);

    // random precoder shape, drawn once per realization and rescaled per point
    Rng prec_rng = derive_stream(spec.seed, 303, realization);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Eigen::Matrix2d> shapes(spec.users);
    for (auto& m : shapes)
      m << gauss(prec_rng), gauss(prec_rng), gauss(prec_rng), gauss(prec_rng);

    for (int level = 0; level < n_levels; ++level) {
      ch.noise_powers.setOnes();
      ch.power_budgets[0] = db_to_linear(spec.grid_db[point]);
      for (int k = 1; k < spec.users; ++k)
        ch.power_budgets[k] = db_to_linear(spec.snr2_db[level]);
      PrecoderSet p;
      for (int k = 0; k < spec.users; ++k)
        p.matrices.push_back(shapes[k] *
                             std::sqrt(ch.power_budgets[k] / shapes[k].squaredNorm()));

      const double analytic = union_bound_ser(ch, p, 0, constellations[0]);
      Rng sim_rng = derive_stream(spec.seed, 404, point, realization, level);
      const double sim = simulate_mean_pep(ch, p, constellations, 0, spec.n_symbols,
                                           sim_rng, spec.interference);

      PepCell& cell = cells[static_cast<std::size_t>(point) * n_levels + level];
      std::lock_guard<std::mutex> guard(
          locks[static_cast<std::size_t>(point) * n_levels + level]);
      cell.sum_analytic += analytic;
      cell.sum_sim += sim;
      cell.pooled_errors += static_cast<long>(std::llround(sim * spec.n_symbols));
      cell.pooled_trials += spec.n_symbols;
      cell.realizations += 1;
    }
  });

  const std::uint64_t hash = spec.config_hash();
  char label[64];
  for (int point = 0; point < n_points; ++point)
    for (int level = 0; level < n_levels; ++level) {
      const PepCell& cell = cells[static_cast<std::size_t>(point) * n_levels + level];
      for (int variant = 0; variant < 2; ++variant) {
        SweepRow row;
        row.snr_db = spec.grid_db[point];
        std::snprintf(label, sizeof(label), "pep-%s-snr2-%gdB",
                      variant == 0 ? "analytic" : "simulated", spec.snr2_db[level]);
        row.scheme = label;
        row.mean_max_ser = (variant == 0 ? cell.sum_analytic : cell.sum_sim) /
                           cell.realizations;
        if (variant == 1) {
          const Interval iv = wilson_interval(cell.pooled_errors, cell.pooled_trials);
          row.ci_low = iv.low;
          row.ci_high = iv.high;
        } else {
          row.ci_low = row.ci_high = row.mean_max_ser;
        }
        row.n_realizations = cell.realizations;
        row.n_symbols = spec.n_symbols;
        row.config_hash = hash;
        result.rows.push_back(std::move(row));
      }
    }
  return result;
}

}  // namespace

SweepResult sweep(const ExperimentSpec& spec, int jobs) {
  const auto start = std::chrono::steady_clock::now();
  SweepResult result = spec.task == TaskKind::ser_sweep
                           ? run_ser_sweep(spec, jobs)
                           : run_pep_validation(spec, jobs);
  std::sort(result.rows.begin(), result.rows.end(),
            [](const SweepRow& a, const SweepRow& b) {
              if (a.snr_db != b.snr_db) return a.snr_db < b.snr_db;
              return a.scheme < b.scheme;
            });
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string to_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "snr_db,scheme,mean_max_ser,ci_low,ci_high,n_realizations,n_symbols,failed,"
      "config_hash\n";
  char buf[256];
  for (const SweepRow& row : rows) {
    std::snprintf(buf, sizeof(buf), "%.6g,%s,%.10g,%.10g,%.10g,%d,%ld,%d,%016llx\n",
                  row.snr_db, row.scheme.c_str(), row.mean_max_ser, row.ci_low,
                  row.ci_high, row.n_realizations, row.n_symbols, row.failed ? 1 : 0,
                  static_cast<unsigned long long>(row.config_hash));
    out += buf;
  }
  return out;
}

nlohmann::json run_metadata(const ExperimentSpec& spec, const SweepResult& result) {
  nlohmann::json meta;
  meta["version"] = version_string();
  meta["seed"] = spec.seed;
  meta["config_hash"] = spec.config_hash();
  meta["spec"] = spec.to_json();
  meta["wall_seconds"] = result.wall_seconds;
  meta["rows"] = result.rows.size();
  meta["failures"] = result.failures;
  if (spec.grid_is_power())
    meta["snr_convention"] =
        "snr_db column is the mean direct-link SNR implied by the swept tx power "
        "(pathloss at the cell-edge distance, E|g|^2 = 1, noise -104 dBm)";
  return meta;
}

const char* version_string() {
#ifdef ICSIG_VERSION
  return ICSIG_VERSION;
#else
  return "0.1.0";
#endif
}

}  // namespace icsig
