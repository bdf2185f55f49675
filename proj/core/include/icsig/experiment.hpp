#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "icsig/algorithms.hpp"
#include "icsig/benchmarks.hpp"
#include "icsig/montecarlo.hpp"

namespace icsig {

enum class Scenario {
  fixed_awgn_2user,
  fixed_awgn_3user,
  cellular_2cell,
  cellular_3cell,
  rayleigh,
};

enum class TaskKind {
  ser_sweep,       // design every scheme and measure the worst-user SER
  pep_validation,  // analytical vs simulated mean PEP with random precoders
};

/// Declarative description of one experiment run, loaded from a JSON file.
/// See README for the schema.
struct ExperimentSpec {
  Scenario scenario = Scenario::rayleigh;
  TaskKind task = TaskKind::ser_sweep;
  int users = 1;
  std::vector<std::string> modulations;
  std::vector<double> grid_db;  // SNR (dB) or, for cellular scenarios, tx power (dBm)
  std::vector<double> snr2_db;  // pep_validation: interferer SNR levels
  std::vector<std::string> schemes;
  long n_symbols = 100000;
  int n_realizations = 1;
  std::uint64_t seed = 1;
  std::string output = "results.csv";
  InterferenceModel interference = InterferenceModel::constellation;
  SerPrefactor ser_prefactor = SerPrefactor::paper;
  int ps_pc_grid = 50;

  bool grid_is_power() const {
    return scenario == Scenario::cellular_2cell || scenario == Scenario::cellular_3cell;
  }

  static ExperimentSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  /// FNV-1a hash of the canonical JSON dump; stamped on every CSV row.
  std::uint64_t config_hash() const;
};

/// Known scheme labels, in canonical order.
const std::vector<std::string>& known_schemes();

/// The fixed coefficient matrices used by the AWGN experiments.
Eigen::MatrixXcd fixed_awgn_matrix(int users);

/// Designs precoders and receivers for one scheme label on one channel.
SchemeOutput design_scheme(const ChannelRealization& ch,
                           const std::vector<Constellation>& constellations,
                           const std::string& scheme, const ExperimentSpec& spec);

struct SweepRow {
  double snr_db = 0.0;  // mean direct-link SNR for cellular scenarios
  std::string scheme;
  double mean_max_ser = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int n_realizations = 0;
  long n_symbols = 0;
  bool failed = false;
  std::uint64_t config_hash = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double wall_seconds = 0.0;
  int failures = 0;
};

/// Runs the experiment over a worker pool. Deterministic for a fixed seed:
/// the row set is independent of the job count and sorted before emission.
SweepResult sweep(const ExperimentSpec& spec, int jobs = 1);

std::string to_csv(const std::vector<SweepRow>& rows);
nlohmann::json run_metadata(const ExperimentSpec& spec, const SweepResult& result);

/// Library version (git describe when available).
const char* version_string();

/// Minimal deterministic work-sharing helper used by the sweep.
void parallel_for(int n_tasks, int jobs, const std::function<void(int)>& fn);

}  // namespace icsig
