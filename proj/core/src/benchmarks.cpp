#include "icsig/benchmarks.hpp"

#include <cmath>
#include <limits>

#include <Eigen/LU>
#include "icsig/convex.hpp"

namespace icsig {

namespace {

PrecoderSet scaled_identity_precoders(const Eigen::VectorXd& powers) {
  PrecoderSet p;
  for (Eigen::Index k = 0; k < powers.size(); ++k)
    p.matrices.push_back(std::sqrt(powers[k] / 2.0) * Eigen::Matrix2d::Identity());
  return p;
}

double worst_user_ser(const ChannelRealization& ch, const PrecoderSet& p,
                      const std::vector<Constellation>& constellations,
                      SerPrefactor prefactor) {
  double worst = 0.0;
  for (int k = 0; k < ch.users; ++k)
    worst = std::max(worst, union_bound_ser(ch, p, k, constellations[k], prefactor));
  return worst;
}

}  // namespace

SchemeOutput ps_pc(const ChannelRealization& ch,
                   const std::vector<Constellation>& constellations,
                   int grid_points, SerPrefactor prefactor) {
  const int users = ch.users;
  if (grid_points < 1) throw ConfigError("grid must have at least one point", "ps_pc_grid");

  Eigen::VectorXd best = ch.power_budgets;
  double best_ser = worst_user_ser(ch, scaled_identity_precoders(best), constellations,
                                   prefactor);

  auto level = [&](int k, int i) {
    return ch.power_budgets[k] * static_cast<double>(i) / grid_points;
  };

  if (users <= 3) {
    // exhaustive grid, p_k in {P_k i/G : i=1..G}
    std::vector<int> idx(users, 1);
    Eigen::VectorXd powers(users);
    for (;;) {
      for (int k = 0; k < users; ++k) powers[k] = level(k, idx[k]);
      const double ser = worst_user_ser(ch, scaled_identity_precoders(powers),
                                        constellations, prefactor);
      if (ser < best_ser) {
        best_ser = ser;
        best = powers;
      }
      int k = 0;
      while (k < users && ++idx[k] > grid_points) idx[k++] = 1;
      if (k == users) break;
    }
  } else {
    // coordinate descent over the same per-user grid
    Eigen::VectorXd powers = ch.power_budgets;
    for (int sweep = 0; sweep < 20; ++sweep) {
      bool improved = false;
      for (int k = 0; k < users; ++k) {
        for (int i = 1; i <= grid_points; ++i) {
          const double save = powers[k];
          powers[k] = level(k, i);
          const double ser = worst_user_ser(ch, scaled_identity_precoders(powers),
                                            constellations, prefactor);
          if (ser < best_ser) {
            best_ser = ser;
            best = powers;
            improved = true;
          } else {
            powers[k] = save;
          }
          powers = best;
        }
      }
      if (!improved) break;
    }
  }

  SchemeOutput out;
  out.scheme = "ps-pc";
  out.detector = DetectorType::identity_euclidean;
  out.precoders = scaled_identity_precoders(best);
  out.receivers.assign(users, Eigen::Matrix2d::Identity());
  out.history = {best_ser};
  return out;
}

Eigen::Matrix2d mse_matrix(const ChannelRealization& ch, const PrecoderSet& p,
                           const std::vector<Eigen::Matrix2d>& receivers, int k) {
  const Eigen::Matrix2d& a = p.matrices[k];
  const Eigen::Matrix2d& r = receivers[k];
  const double hkk = ch.magnitudes(k, k);
  const Eigen::Matrix2d total =
      interference_covariance(ch, p, k) + hkk * hkk * a * a.transpose();
  return r.transpose() * total * r - hkk * r.transpose() * a -
         hkk * a.transpose() * r + Eigen::Matrix2d::Identity();
}

namespace {

// Shared machinery of the two MSE schemes. Solved in the same normalized
// units as the alternating designs (see algorithms.cpp); the MSE values are
// invariant when R is rescaled accordingly.
struct MseNormalization {
  ChannelRealization ch;
  double amplitude_scale;
  double receiver_scale;
};

MseNormalization mse_normalize(const ChannelRealization& ch) {
  MseNormalization ni{ch, 1.0, 1.0};
  const double s_p = ch.power_budgets.mean();
  const double s_n = ch.noise_powers.mean();
  ni.ch.magnitudes *= std::sqrt(s_p / s_n);
  ni.ch.power_budgets /= s_p;
  ni.ch.noise_powers /= s_n;
  ni.amplitude_scale = std::sqrt(s_p);
  ni.receiver_scale = 1.0 / std::sqrt(s_n);
  return ni;
}

std::vector<Eigen::Matrix2d> mmse_receivers(const ChannelRealization& ch,
                                            const PrecoderSet& p) {
  std::vector<Eigen::Matrix2d> r;
  r.reserve(ch.users);
  for (int k = 0; k < ch.users; ++k) {
    const double hkk = ch.magnitudes(k, k);
    const Eigen::Matrix2d total = interference_covariance(ch, p, k) +
                                  hkk * hkk * p.matrices[k] * p.matrices[k].transpose();
    r.push_back(hkk * total.inverse() * p.matrices[k]);
  }
  return r;
}

int a_index(int user, int row, int col) { return 1 + 4 * user + 2 * col + row; }

// Adds [E_k]_ii as a function of the precoder variables (receivers fixed)
// into the quadratic form q.
void add_stream_mse_terms(QuadraticFunction& q, const ChannelRealization& ch,
                          const std::vector<Eigen::Matrix2d>& receivers, int k,
                          int stream) {
  const Eigen::Vector2d r = receivers[k].col(stream);
  q.add_constant(1.0 + 0.5 * ch.noise_powers[k] * r.squaredNorm());
  const double hkk = ch.magnitudes(k, k);
  for (int l = 0; l < ch.users; ++l) {
    Eigen::Vector2d u;
    double w;
    if (l == k) {
      u = r;
      w = hkk * hkk;
    } else {
      u = rotation(relative_phase(ch, k, l)).transpose() * r;
      w = ch.magnitudes(k, l) * ch.magnitudes(k, l);
    }
    q.add_rank1({a_index(l, 0, 0), a_index(l, 1, 0)}, u, w);
    q.add_rank1({a_index(l, 0, 1), a_index(l, 1, 1)}, u, w);
  }
  for (int m = 0; m < 2; ++m) q.add_linear(a_index(k, m, stream), -2.0 * hkk * r[m]);
}

std::unique_ptr<QuadraticFunction> power_constraint(int dim, int user, double budget) {
  auto q = std::make_unique<QuadraticFunction>(dim);
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n) q->add_square(a_index(user, m, n), 1.0);
  q->add_constant(-budget);
  return q;
}

PrecoderSet solve_precoder_step(const ChannelRealization& ch,
                                const std::vector<Eigen::Matrix2d>& receivers,
                                const PrecoderSet& warm, bool minmax) {
  const int users = ch.users;
  const int dim = 1 + 4 * users;

  BarrierProblem problem;
  problem.dimension = dim;
  auto objective = std::make_unique<QuadraticFunction>(dim);
  objective->add_linear(0, 1.0);
  problem.objective = std::move(objective);

  if (minmax) {
    for (int k = 0; k < users; ++k)
      for (int stream = 0; stream < 2; ++stream) {
        auto q = std::make_unique<QuadraticFunction>(dim);
        add_stream_mse_terms(*q, ch, receivers, k, stream);
        q->add_linear(0, -1.0);
        problem.constraints.push_back(std::move(q));
      }
  } else {
    auto q = std::make_unique<QuadraticFunction>(dim);
    for (int k = 0; k < users; ++k)
      for (int stream = 0; stream < 2; ++stream)
        add_stream_mse_terms(*q, ch, receivers, k, stream);
    q->add_linear(0, -1.0);
    problem.constraints.push_back(std::move(q));
  }
  for (int k = 0; k < users; ++k)
    problem.constraints.push_back(power_constraint(dim, k, ch.power_budgets[k]));

  // strictly feasible start: shrunk warm precoders, epigraph above the value
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(dim);
  PrecoderSet start = warm;
  for (int k = 0; k < users; ++k) {
    const double tr = start.matrices[k].squaredNorm();
    const double cap = ch.power_budgets[k] * (1.0 - 1e-7);
    if (tr > cap) start.matrices[k] *= std::sqrt(cap / tr);
    for (int m = 0; m < 2; ++m)
      for (int n = 0; n < 2; ++n) x0[a_index(k, m, n)] = start.matrices[k](m, n);
  }
  double max_f = 0.0;
  const std::size_t n_mse = minmax ? 2 * users : 1;
  for (std::size_t i = 0; i < n_mse; ++i)
    max_f = std::max(max_f, problem.constraints[i]->value(x0));
  x0[0] = max_f + 1.0 + 0.1 * std::abs(max_f);

  const SolverPoint point = barrier_solve(problem, x0);
  PrecoderSet p;
  p.matrices.resize(users);
  for (int k = 0; k < users; ++k)
    for (int m = 0; m < 2; ++m)
      for (int n = 0; n < 2; ++n) p.matrices[k](m, n) = point.x[a_index(k, m, n)];
  return p;
}

double mse_objective(const ChannelRealization& ch, const PrecoderSet& p,
                     const std::vector<Eigen::Matrix2d>& receivers, bool minmax) {
  double sum = 0.0, worst = 0.0;
  for (int k = 0; k < ch.users; ++k) {
    const Eigen::Matrix2d e = mse_matrix(ch, p, receivers, k);
    sum += e.trace();
    worst = std::max({worst, e(0, 0), e(1, 1)});
  }
  return minmax ? worst : sum;
}

SchemeOutput run_mse(const ChannelRealization& ch_in, const MseConfig& cfg, bool minmax) {
  const MseNormalization ni = mse_normalize(ch_in);
  const ChannelRealization& ch = ni.ch;

  SchemeOutput out;
  out.scheme = minmax ? "minmax-mse" : "minsum-mse";
  out.detector = DetectorType::mse_euclidean;

  PrecoderSet p = PrecoderSet::proper(ch);
  std::vector<Eigen::Matrix2d> r = mmse_receivers(ch, p);
  double objective = mse_objective(ch, p, r, minmax);
  out.history.push_back(objective);

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    PrecoderSet p_new;
    try {
      p_new = solve_precoder_step(ch, r, p, minmax);
    } catch (const SolverError&) {
      out.degraded = true;
      break;
    }
    std::vector<Eigen::Matrix2d> r_new = mmse_receivers(ch, p_new);
    const double objective_new = mse_objective(ch, p_new, r_new, minmax);
    if (objective_new > objective) break;  // numerical floor reached
    p = std::move(p_new);
    r = std::move(r_new);
    const double drop = objective - objective_new;
    objective = objective_new;
    out.history.push_back(objective);
    if (drop <= cfg.tol * std::max(1.0, objective)) break;
  }

  for (auto& m : p.matrices) m *= ni.amplitude_scale;
  for (auto& m : r) m *= ni.receiver_scale;
  out.precoders = std::move(p);
  out.receivers = std::move(r);
  return out;
}

// --- IA helpers -------------------------------------------------------------

// Smallest-eigenvalue unit eigenvector of a symmetric 2x2 matrix, with a
// deterministic sign (first nonzero component positive).
Eigen::Vector2d least_eigenvector(const Eigen::Matrix2d& m) {
  const double a = m(0, 0), c = m(1, 1);
  const double b = 0.5 * (m(0, 1) + m(1, 0));
  const double disc = std::hypot(0.5 * (a - c), b);
  const double lmin = 0.5 * (a + c) - disc;
  Eigen::Vector2d v;
  if (std::abs(b) > 1e-300) {
    v << b, lmin - a;
  } else if (a <= c) {
    v << 1.0, 0.0;
  } else {
    v << 0.0, 1.0;
  }
  v.normalize();
  if (v.x() < 0.0 || (v.x() == 0.0 && v.y() < 0.0)) v = -v;
  return v;
}

Eigen::Vector2d fix_sign(Eigen::Vector2d v) {
  if (v.x() < 0.0 || (v.x() == 0.0 && v.y() < 0.0)) v = -v;
  return v;
}

struct Beamformers {
  std::vector<Eigen::Vector2d> tx;  // unit v_k
  std::vector<Eigen::Vector2d> rx;  // unit u_k
};

// Interference covariance seen by receiver k (post derotation), with the
// transmit powers folded in: sum_{l != k} |h_kl|^2 P_l J(phi_kl) v_l v_l^T J^T.
Eigen::Matrix2d rx_interference(const ChannelRealization& ch, const Beamformers& bf, int k) {
  Eigen::Matrix2d c = Eigen::Matrix2d::Zero();
  for (int l = 0; l < ch.users; ++l) {
    if (l == k) continue;
    const Eigen::Vector2d jv = rotation(relative_phase(ch, k, l)) * bf.tx[l];
    c.noalias() += ch.magnitudes(k, l) * ch.magnitudes(k, l) * ch.power_budgets[l] *
                   jv * jv.transpose();
  }
  return c;
}

// Leakage caused by transmitter l across all other receivers, as a quadratic
// form in v_l.
Eigen::Matrix2d tx_leakage_matrix(const ChannelRealization& ch, const Beamformers& bf, int l) {
  Eigen::Matrix2d c = Eigen::Matrix2d::Zero();
  for (int k = 0; k < ch.users; ++k) {
    if (k == l) continue;
    const Eigen::Vector2d ju = rotation(relative_phase(ch, k, l)).transpose() * bf.rx[k];
    c.noalias() += ch.magnitudes(k, l) * ch.magnitudes(k, l) * ch.power_budgets[l] *
                   ju * ju.transpose();
  }
  return c;
}

double total_leakage(const ChannelRealization& ch, const Beamformers& bf) {
  double sum = 0.0;
  for (int k = 0; k < ch.users; ++k)
    sum += bf.rx[k].dot(rx_interference(ch, bf, k) * bf.rx[k]);
  return sum;
}

SchemeOutput beamformers_to_output(const ChannelRealization& ch, const Beamformers& bf,
                                   std::string scheme) {
  SchemeOutput out;
  out.scheme = std::move(scheme);
  out.detector = DetectorType::beamformed_1d;
  out.total_leakage = total_leakage(ch, bf);
  for (int k = 0; k < ch.users; ++k) {
    // PAM symbols carry mean-square 2, so |v|^2 = P/2 spends the full budget
    Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
    a.col(0) = std::sqrt(ch.power_budgets[k] / 2.0) * bf.tx[k];
    out.precoders.matrices.push_back(a);
    Eigen::Matrix2d r = Eigen::Matrix2d::Zero();
    r.col(0) = bf.rx[k];
    out.receivers.push_back(r);
  }
  return out;
}

Beamformers min_il_beamformers(const ChannelRealization& ch, const IaConfig& cfg,
                               std::vector<double>* history) {
  Beamformers bf;
  bf.tx.assign(ch.users, Eigen::Vector2d(1.0, 0.0));
  bf.rx.assign(ch.users, Eigen::Vector2d(1.0, 0.0));
  // leakage scale for the stopping rule: total received signal power
  double scale = 0.0;
  for (int k = 0; k < ch.users; ++k)
    scale += ch.magnitudes(k, k) * ch.magnitudes(k, k) * ch.power_budgets[k];
  double leakage = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    for (int k = 0; k < ch.users; ++k)
      bf.rx[k] = least_eigenvector(rx_interference(ch, bf, k));
    for (int l = 0; l < ch.users; ++l)
      bf.tx[l] = least_eigenvector(tx_leakage_matrix(ch, bf, l));
    const double now = total_leakage(ch, bf);
    if (history) history->push_back(now);
    if (leakage - now <= cfg.tol * scale) {
      leakage = now;
      break;
    }
    leakage = now;
  }
  // final receiver pass so rx is exactly optimal for the returned tx
  for (int k = 0; k < ch.users; ++k)
    bf.rx[k] = least_eigenvector(rx_interference(ch, bf, k));
  return bf;
}

}  // namespace

SchemeOutput minsum_mse(const ChannelRealization& ch, const MseConfig& cfg) {
  return run_mse(ch, cfg, /*minmax=*/false);
}

SchemeOutput minmax_mse(const ChannelRealization& ch, const MseConfig& cfg) {
  return run_mse(ch, cfg, /*minmax=*/true);
}

SchemeOutput min_il_ia(const ChannelRealization& ch, const IaConfig& cfg) {
  std::vector<double> history;
  const Beamformers bf = min_il_beamformers(ch, cfg, &history);
  SchemeOutput out = beamformers_to_output(ch, bf, "minil-ia");
  out.history = std::move(history);
  return out;
}

SchemeOutput max_sinr_ia(const ChannelRealization& ch, const IaConfig& cfg) {
  Beamformers bf = min_il_beamformers(ch, cfg, nullptr);
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    double change = 0.0;
    for (int k = 0; k < ch.users; ++k) {
      const Eigen::Matrix2d b =
          rx_interference(ch, bf, k) +
          0.5 * ch.noise_powers[k] * Eigen::Matrix2d::Identity();
      const Eigen::Vector2d u = fix_sign((b.inverse() * bf.tx[k]).normalized());
      change = std::max(change, (u - bf.rx[k]).norm());
      bf.rx[k] = u;
    }
    for (int l = 0; l < ch.users; ++l) {
      Eigen::Matrix2d b = 0.5 * ch.noise_powers[l] * Eigen::Matrix2d::Identity();
      for (int k = 0; k < ch.users; ++k) {
        if (k == l) continue;
        const Eigen::Vector2d ju = rotation(relative_phase(ch, k, l)).transpose() * bf.rx[k];
        b.noalias() += ch.magnitudes(k, l) * ch.magnitudes(k, l) *
                       ch.power_budgets[k] * ju * ju.transpose();
      }
      const Eigen::Vector2d v = fix_sign((b.inverse() * bf.rx[l]).normalized());
      change = std::max(change, (v - bf.tx[l]).norm());
      bf.tx[l] = v;
    }
    if (change <= cfg.tol) break;
  }
  return beamformers_to_output(ch, bf, "maxsinr-ia");
}

double ia_sinr(const ChannelRealization& ch, const SchemeOutput& out, int k) {
  const Eigen::Vector2d u = out.receivers[k].col(0);
  const Eigen::Vector2d v_scaled = out.precoders.matrices[k].col(0);
  const double hkk = ch.magnitudes(k, k);
  // desired symbol power: E[s^2] = 2 over the PAM set
  const double signal = 2.0 * hkk * hkk * std::pow(u.dot(v_scaled), 2);
  Eigen::Matrix2d c = 0.5 * ch.noise_powers[k] * Eigen::Matrix2d::Identity();
  for (int l = 0; l < ch.users; ++l) {
    if (l == k) continue;
    const Eigen::Vector2d jv =
        rotation(relative_phase(ch, k, l)) * out.precoders.matrices[l].col(0);
    c.noalias() += 2.0 * ch.magnitudes(k, l) * ch.magnitudes(k, l) * jv * jv.transpose();
  }
  return signal / u.dot(c * u);
}

double ia_total_leakage(const ChannelRealization& ch, const SchemeOutput& out) {
  double sum = 0.0;
  for (int k = 0; k < ch.users; ++k) {
    const Eigen::Vector2d u = out.receivers[k].col(0);
    for (int l = 0; l < ch.users; ++l) {
      if (l == k) continue;
      const Eigen::Vector2d jv =
          rotation(relative_phase(ch, k, l)) * out.precoders.matrices[l].col(0);
      sum += 2.0 * ch.magnitudes(k, l) * ch.magnitudes(k, l) * std::pow(u.dot(jv), 2);
    }
  }
  return sum;
}

}  // namespace icsig
