#include "icsig/algorithms.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace icsig {

Eigen::Matrix2Xd closed_form_b(const ChannelRealization& ch, const PrecoderSet& p,
                               const DifferenceMatrix& rows, int k) {
  const Eigen::Matrix2d w = interference_covariance(ch, p, k);
  const Eigen::Matrix2d winv_sqrt = sym_inv_sqrt(w);
  const Eigen::Matrix2d winv = winv_sqrt * winv_sqrt;
  Eigen::Matrix2Xd b(2, rows.count());
  const Eigen::Matrix2d lead = ch.magnitudes(k, k) * winv * p.matrices[k];
  for (int i = 0; i < rows.count(); ++i) b.col(i) = lead * rows.rows[i];
  return b;
}

Eigen::MatrixXd evaluate_g(const ChannelRealization& ch, const PrecoderSet& p,
                           const Eigen::Matrix2Xd& b, const DifferenceMatrix& rows,
                           int k) {
  Eigen::MatrixXd g = 0.5 * ch.noise_powers[k] * (b.transpose() * b);
  for (int l = 0; l < ch.users; ++l) {
    if (l == k) continue;
    const Eigen::Matrix2d ja = rotation(relative_phase(ch, k, l)) * p.matrices[l];
    const Eigen::MatrixXd bja = b.transpose() * ja;  // d x 2
    g.noalias() += ch.magnitudes(k, l) * ch.magnitudes(k, l) * bja * bja.transpose();
  }
  const Eigen::MatrixXd r = rows.as_matrix();  // d x 2
  const Eigen::MatrixXd cross =
      ch.magnitudes(k, k) * (b.transpose() * p.matrices[k] * r.transpose());
  g -= cross + cross.transpose();
  return g;
}

namespace {

// The precoder subproblems are scale-invariant: (A, h, sigma^2, P) and
// (A/sqrt(sP), h*sqrt(sP/sN), sigma^2/sN, P/sP) describe the same PEPs. The
// drivers optimize in normalized units so the barrier solver sees O(1) data
// even for cellular instances (budgets ~1e5 mW, gains ~1e-6).
struct NormalizedInstance {
  ChannelRealization ch;
  double amplitude_scale = 1.0;  // multiply normalized A by this to denormalize
};

NormalizedInstance normalize_instance(const ChannelRealization& ch) {
  NormalizedInstance ni;
  ni.ch = ch;
  const double s_p = ch.power_budgets.mean();
  const double s_n = ch.noise_powers.mean();
  ni.ch.magnitudes *= std::sqrt(s_p / s_n);
  ni.ch.power_budgets /= s_p;
  ni.ch.noise_powers /= s_n;
  ni.amplitude_scale = std::sqrt(s_p);
  return ni;
}

double true_metric(const ChannelRealization& ch, const PrecoderSet& p,
                   const std::vector<Constellation>& constellations,
                   const std::vector<DifferenceMatrix>& rows, Variant variant) {
  double worst = 0.0;
  for (int k = 0; k < ch.users; ++k) {
    const double v = variant == Variant::pep
                         ? worst_pep(ch, p, k, rows[k])
                         : union_bound_ser(ch, p, k, constellations[k]);
    worst = std::max(worst, v);
  }
  return worst;
}

template <typename SolveFn>
AlternatingResult run_alternating(const ChannelRealization& ch_in,
                                  const std::vector<Constellation>& constellations,
                                  const AlgoConfig& cfg,
                                  const std::vector<DifferenceMatrix>& rows,
                                  SolveFn&& solve_inner) {
  if (static_cast<int>(constellations.size()) != ch_in.users)
    throw ConfigError("one constellation per user is required", "modulations");

  const NormalizedInstance ni = normalize_instance(ch_in);
  const ChannelRealization& ch = ni.ch;
  const int users = ch.users;

  AlternatingResult result;
  PrecoderSet a = PrecoderSet::proper(ch);
  double objective = true_metric(ch, a, constellations, rows, cfg.variant);
  result.history.push_back(objective);

  std::vector<Eigen::Matrix2Xd> b_prev;
  for (int iter = 1; iter <= cfg.max_outer_iterations; ++iter) {
    std::vector<Eigen::Matrix2Xd> b(users);
    for (int k = 0; k < users; ++k) b[k] = closed_form_b(ch, a, rows[k], k);

    PrecoderSet a_new;
    bool solved = false;
    try {
      a_new = solve_inner(ch, b, a);
      solved = true;
    } catch (const SolverError&) {
      // one retry from the proper-signaling initializer
      try {
        a_new = solve_inner(ch, b, PrecoderSet::proper(ch));
        solved = true;
      } catch (const SolverError&) {
        result.degraded = true;
      }
    }
    if (!solved) {
      result.iterations = iter;
      break;
    }

    const double objective_new =
        true_metric(ch, a_new, constellations, rows, cfg.variant);
    result.iterations = iter;
    if (objective_new > objective) {
      // numerical noise at convergence: keep the previous block value
      result.history.push_back(objective);
      result.converged = true;
      break;
    }

    double delta = 0.0;
    for (int k = 0; k < users; ++k) {
      const double scale = 1.0 / std::sqrt(ch.power_budgets[k]);
      delta = std::max(delta, (a_new.matrices[k] - a.matrices[k]).norm() * scale);
      if (!b_prev.empty())
        delta = std::max(delta, (b[k] - b_prev[k]).norm() * scale);
    }
    a = a_new;
    objective = objective_new;
    result.history.push_back(objective);
    b_prev = std::move(b);

    if (!b_prev.empty() && iter > 1 && delta <= cfg.convergence_tol) {
      result.converged = true;
      break;
    }
  }

  for (auto& m : a.matrices) m *= ni.amplitude_scale;
  result.precoders = std::move(a);
  result.objective = objective;  // invariant under the normalization
  return result;
}

}  // namespace

AlternatingResult minmax_pep(const ChannelRealization& ch,
                             const std::vector<Constellation>& constellations,
                             const AlgoConfig& cfg) {
  std::vector<DifferenceMatrix> rows;
  rows.reserve(constellations.size());
  for (const Constellation& c : constellations)
    rows.push_back(reduce_difference_matrix(difference_matrix(c)));

  AlgoConfig cfg_pep = cfg;
  cfg_pep.variant = Variant::pep;
  return run_alternating(ch, constellations, cfg_pep, rows,
                         [&rows](const ChannelRealization& nch,
                                 const std::vector<Eigen::Matrix2Xd>& b,
                                 const PrecoderSet& warm) {
                           SubproblemPs1 sp = SubproblemPs1::build(nch, b, rows);
                           return solve_ps1(sp, warm).precoders;
                         });
}

AlternatingResult minmax_ser(const ChannelRealization& ch,
                             const std::vector<Constellation>& constellations,
                             const AlgoConfig& cfg) {
  std::vector<DifferenceMatrix> rows;
  rows.reserve(constellations.size());
  for (const Constellation& c : constellations)
    rows.push_back(difference_matrix(c));

  AlgoConfig cfg_ser = cfg;
  cfg_ser.variant = Variant::ser;
  return run_alternating(ch, constellations, cfg_ser, rows,
                         [&rows](const ChannelRealization& nch,
                                 const std::vector<Eigen::Matrix2Xd>& b,
                                 const PrecoderSet& warm) {
                           SubproblemPs2 sp = SubproblemPs2::build(nch, b, rows);
                           return solve_ps2(sp, warm).precoders;
                         });
}

void save_precoders_csv(std::ostream& out, const PrecoderSet& p) {
  out << "user,a11,a12,a21,a22\n";
  char buf[160];
  for (int k = 0; k < p.users(); ++k) {
    const Eigen::Matrix2d& a = p.matrices[k];
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g\n", k, a(0, 0),
                  a(0, 1), a(1, 0), a(1, 1));
    out << buf;
  }
}

PrecoderSet load_precoders_csv(std::istream& in) {
  PrecoderSet p;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    int user;
    double a11, a12, a21, a22;
    char comma;
    if (!(ss >> user >> comma >> a11 >> comma >> a12 >> comma >> a21 >> comma >> a22))
      throw ConfigError("malformed precoder CSV line: " + line, "precoder_csv");
    Eigen::Matrix2d a;
    a << a11, a12, a21, a22;
    p.matrices.push_back(a);
  }
  return p;
}

}  // namespace icsig
