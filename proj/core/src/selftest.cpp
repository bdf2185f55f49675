#include "icsig/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "icsig/algorithms.hpp"
#include "icsig/convex.hpp"
#include "icsig/montecarlo.hpp"

namespace icsig {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Reference difference rows for the normalized QPSK and 8PSK sets (unordered,
// sign-insensitive).
std::vector<Eigen::Vector2d> reference_rows(const std::string& which) {
  const double r = std::sqrt(2.0);
  if (which == "f_qpsk")
    return {{0, 2}, {2, 2}, {2, 0}, {2, 0}, {2, -2}, {0, -2}};
  if (which == "q_qpsk") return {{0, 2}, {2, 2}, {2, 0}, {2, -2}};
  if (which == "q_8psk")
    return {{r - 1, -1}, {r, -r}, {1, 1 - r}, {2, 0},
            {1, r - 1},  {r, r},  {r - 1, 1}, {0, 2}};
  // f_8psk
  return {
      {r - 1, -1}, {r, -r},     {r + 1, -1}, {2 * r, 0},  {r + 1, 1},
      {r, r},      {r - 1, 1},  {1, 1 - r},  {2, 0},      {r + 1, 1},
      {2, 2},      {1, r + 1},  {0, 2},      {1, r - 1},  {r, r},
      {1, r + 1},  {0, 2 * r},  {-1, r + 1}, {r - 1, 1},  {0, 2},
      {-1, r + 1}, {-2, 2},     {1 - r, 1},  {-r, r},     {-r - 1, 1},
      {-1, r - 1}, {-2, 0},     {-1, 1 - r},
  };
}

bool rows_match(std::vector<Eigen::Vector2d> a, std::vector<Eigen::Vector2d> b) {
  if (a.size() != b.size()) return false;
  auto canonical = [](Eigen::Vector2d v) {
    if (v.x() < 0.0 || (v.x() == 0.0 && v.y() < 0.0)) v = -v;
    return v;
  };
  auto less = [](const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
    if (u.x() != v.x()) return u.x() < v.x();
    return u.y() < v.y();
  };
  for (auto& v : a) v = canonical(v);
  for (auto& v : b) v = canonical(v);
  std::sort(a.begin(), a.end(), less);
  std::sort(b.begin(), b.end(), less);
  for (std::size_t i = 0; i < a.size(); ++i)
    if ((a[i] - b[i]).lpNorm<Eigen::Infinity>() > 1e-12) return false;
  return true;
}

CheckResult check_constellation_goldens() {
  const auto start = Clock::now();
  CheckResult result{"constellation-goldens", true, "", 0.0};
  const DifferenceMatrix f4 = difference_matrix(build_constellation("qpsk"));
  const DifferenceMatrix q4 = reduce_difference_matrix(f4);
  const DifferenceMatrix f8 = difference_matrix(build_constellation("8psk"));
  const DifferenceMatrix q8 = reduce_difference_matrix(f8);
  std::ostringstream detail;
  detail << "F4=" << f4.count() << " Q4=" << q4.count() << " F8=" << f8.count()
         << " Q8=" << q8.count();
  result.detail = detail.str();
  result.pass = f4.count() == 6 && q4.count() == 4 && f8.count() == 28 &&
                q8.count() == 8 && rows_match(f4.rows, reference_rows("f_qpsk")) &&
                rows_match(q4.rows, reference_rows("q_qpsk")) &&
                rows_match(f8.rows, reference_rows("f_8psk")) &&
                rows_match(q8.rows, reference_rows("q_8psk"));
  result.seconds = seconds_since(start);
  return result;
}

CheckResult check_pep_smoke(bool quick) {
  const auto start = Clock::now();
  CheckResult result{"pep-vs-montecarlo", true, "", 0.0};
  const long trials = quick ? 40000 : 400000;
  Rng rng = derive_stream(20240926, 1);
  double worst_sigma = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    ChannelRealization ch = rayleigh_channel(2, rng);
    set_equal_snr_db(ch, 5.0 * trial);
    std::normal_distribution<double> gauss(0.0, 1.0);
    PrecoderSet p;
    for (int k = 0; k < 2; ++k) {
      Eigen::Matrix2d a;
      a << gauss(rng), gauss(rng), gauss(rng), gauss(rng);
      a *= std::sqrt(ch.power_budgets[k] / a.squaredNorm());
      p.matrices.push_back(a);
    }
    const std::vector<Constellation> cs = {build_constellation("8psk"),
                                           build_constellation("qpsk")};
    const double analytic = union_bound_ser(ch, p, 0, cs[0]);
    const double simulated = simulate_mean_pep(ch, p, cs, 0, trials, rng);
    const double se = std::sqrt(std::max(analytic * (1 - analytic), 1e-12) / trials);
    worst_sigma = std::max(worst_sigma, std::abs(analytic - simulated) / se);
  }
  std::ostringstream detail;
  detail << "worst deviation " << worst_sigma << " sigma over 3 instances";
  result.detail = detail.str();
  result.pass = worst_sigma <= 3.0;
  result.seconds = seconds_since(start);
  return result;
}

CheckResult check_golden(const std::string& golden_dir) {
  const auto start = Clock::now();
  CheckResult result{"solver-goldens", false, "", 0.0};
  std::ifstream inst_file(golden_dir + "/instances.json");
  std::ifstream gold_file(golden_dir + "/golden.json");
  if (!inst_file.good() || !gold_file.good()) {
    result.detail = "missing instances.json/golden.json under " + golden_dir;
    result.seconds = seconds_since(start);
    return result;
  }
  try {
    nlohmann::json instances, golden;
    inst_file >> instances;
    gold_file >> golden;
    const std::vector<GoldenOutcome> outcomes = run_golden_instances(instances, golden);
    int failures = 0;
    double worst_rel = 0.0;
    for (const GoldenOutcome& o : outcomes) {
      if (!o.pass) ++failures;
      worst_rel = std::max(worst_rel,
                           std::abs(o.objective - o.expected) /
                               std::max(1e-8, std::abs(o.expected)));
    }
    std::ostringstream detail;
    detail << outcomes.size() << " instances, worst relative error " << worst_rel;
    if (failures) detail << ", " << failures << " FAILED";
    result.detail = detail.str();
    result.pass = failures == 0 && !outcomes.empty();
  } catch (const std::exception& e) {
    result.detail = std::string("corrupted golden data: ") + e.what();
    result.pass = false;
  }
  result.seconds = seconds_since(start);
  return result;
}

CheckResult check_descent(bool quick) {
  const auto start = Clock::now();
  CheckResult result{"alternating-descent", true, "", 0.0};
  const int instances = quick ? 3 : 10;
  Rng rng = derive_stream(20240926, 2);
  const std::vector<Constellation> cs(3, build_constellation("qpsk"));
  int violations = 0;
  for (int trial = 0; trial < instances; ++trial) {
    ChannelRealization ch = rayleigh_channel(3, rng);
    set_equal_snr_db(ch, 10.0);
    for (const bool use_ser : {false, true}) {
      const AlternatingResult r =
          use_ser ? minmax_ser(ch, cs) : minmax_pep(ch, cs);
      if (!r.converged || r.degraded) ++violations;
      for (std::size_t i = 1; i < r.history.size(); ++i)
        if (r.history[i] > r.history[i - 1] + 1e-7) ++violations;
    }
  }
  std::ostringstream detail;
  detail << instances << " instances x 2 variants, " << violations << " violations";
  result.detail = detail.str();
  result.pass = violations == 0;
  result.seconds = seconds_since(start);
  return result;
}

}  // namespace

std::vector<GoldenOutcome> run_golden_instances(const nlohmann::json& instances,
                                                const nlohmann::json& golden) {
  if (instances.size() != golden.size())
    throw ConfigError("instance and golden files disagree in length", "golden");
  std::vector<GoldenOutcome> outcomes;
  for (std::size_t idx = 0; idx < instances.size(); ++idx) {
    const nlohmann::json& inst = instances[idx];
    GoldenOutcome outcome;
    outcome.index = static_cast<int>(idx);
    outcome.kind = inst.at("kind").get<std::string>();
    outcome.expected = golden[idx].at("objective").get<double>();

    const int users = inst.at("users").get<int>();
    ChannelRealization ch = fixed_channel(Eigen::MatrixXcd::Identity(users, users));
    for (int k = 0; k < users; ++k) {
      ch.noise_powers[k] = inst.at("noise")[k].get<double>();
      ch.power_budgets[k] = inst.at("budget")[k].get<double>();
      for (int l = 0; l < users; ++l) {
        ch.magnitudes(k, l) = inst.at("magnitude")[k][l].get<double>();
        ch.phases(k, l) = inst.at("phase")[k][l].get<double>();
      }
    }
    std::vector<DifferenceMatrix> rows(users);
    std::vector<Eigen::Matrix2Xd> b(users);
    for (int k = 0; k < users; ++k) {
      for (const auto& r : inst.at("rows")[k])
        rows[k].rows.emplace_back(r[0].get<double>(), r[1].get<double>());
      b[k].resize(2, rows[k].count());
      for (int i = 0; i < rows[k].count(); ++i) {
        b[k](0, i) = inst.at("b")[k][i][0].get<double>();
        b[k](1, i) = inst.at("b")[k][i][1].get<double>();
      }
    }
    const PrecoderSet warm = PrecoderSet::proper(ch);
    if (outcome.kind == "ps1") {
      const SubproblemPs1 sp = SubproblemPs1::build(ch, b, rows);
      const Ps1Solution sol = solve_ps1(sp, warm);
      outcome.objective = sol.alpha;
      outcome.kkt = kkt_residual(sp.problem, sol.point);
    } else {
      const SubproblemPs2 sp = SubproblemPs2::build(ch, b, rows);
      const Ps2Solution sol = solve_ps2(sp, warm);
      outcome.objective = sol.t;
      outcome.kkt = kkt_residual(sp.problem, sol.point);
    }
    outcome.pass = std::abs(outcome.objective - outcome.expected) <=
                       1e-5 * std::max(1e-8, std::abs(outcome.expected)) &&
                   outcome.kkt <= 1e-8;
    outcomes.push_back(outcome);
  }
  return outcomes;
}

std::vector<CheckResult> run_verification(const std::string& golden_dir, bool quick) {
  std::vector<CheckResult> results;
  results.push_back(check_constellation_goldens());
  results.push_back(check_pep_smoke(quick));
  results.push_back(check_golden(golden_dir));
  results.push_back(check_descent(quick));
  return results;
}

}  // namespace icsig
