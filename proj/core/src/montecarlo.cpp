#include "icsig/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace icsig {

namespace {

struct ReceiverContext {
  // per-transmitter effective matrices R^T |h_kl| J(phi_kl) A_l, so the
  // detector input is r = sum_l eff[l] d_l + R^T n
  std::vector<Eigen::Matrix2d> eff;
  Eigen::Matrix2d rx_noise;                 // R^T applied to noise
  std::vector<Eigen::Vector2d> candidates;  // detector hypotheses in r-space
  double noise_std = 0.0;                   // per component, before R^T
  bool scalar = false;                      // beamformed 1-D detection
  std::vector<double> scalar_candidates;
};

ReceiverContext make_context(const ChannelRealization& ch, const SchemeOutput& scheme,
                             const std::vector<Constellation>& tx_sets, int k) {
  ReceiverContext ctx;
  const int users = ch.users;
  Eigen::Matrix2d r_t;  // transpose of the applied receiver matrix
  switch (scheme.detector) {
    case DetectorType::identity_euclidean:
      r_t = Eigen::Matrix2d::Identity();
      break;
    case DetectorType::whitened_euclidean:
    case DetectorType::mse_euclidean:
    case DetectorType::beamformed_1d:
      r_t = scheme.receivers[k].transpose();
      break;
  }
  ctx.eff.resize(users);
  for (int l = 0; l < users; ++l) {
    const Eigen::Matrix2d j =
        l == k ? Eigen::Matrix2d::Identity() : rotation(relative_phase(ch, k, l));
    ctx.eff[l] = r_t * (ch.magnitudes(k, l) * j * scheme.precoders.matrices[l]);
  }
  ctx.rx_noise = r_t;
  ctx.noise_std = std::sqrt(0.5 * ch.noise_powers[k]);

  const Constellation& c = tx_sets[k];
  if (scheme.detector == DetectorType::beamformed_1d) {
    ctx.scalar = true;
    for (const auto& d : c.symbols)
      ctx.scalar_candidates.push_back((ctx.eff[k] * d).x());
  } else if (scheme.detector == DetectorType::mse_euclidean) {
    for (const auto& d : c.symbols) ctx.candidates.push_back(d);
  } else {
    for (const auto& d : c.symbols) ctx.candidates.push_back(ctx.eff[k] * d);
  }
  return ctx;
}

int detect(const ReceiverContext& ctx, const Eigen::Vector2d& r) {
  int best = 0;
  if (ctx.scalar) {
    const double z = r.x();
    double best_metric = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < ctx.scalar_candidates.size(); ++m) {
      const double metric = std::abs(z - ctx.scalar_candidates[m]);
      if (metric < best_metric) {
        best_metric = metric;
        best = static_cast<int>(m);
      }
    }
    return best;
  }
  double best_metric = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < ctx.candidates.size(); ++m) {
    const double metric = (r - ctx.candidates[m]).squaredNorm();
    if (metric < best_metric) {
      best_metric = metric;
      best = static_cast<int>(m);
    }
  }
  return best;
}

}  // namespace

SimResult simulate_ser(const ChannelRealization& ch, const SchemeOutput& scheme,
                       const std::vector<Constellation>& constellations,
                       long n_symbols, Rng& rng, InterferenceModel interference) {
  const int users = ch.users;

  // IA schemes transmit the PAM equivalents of the configured constellations
  std::vector<Constellation> tx_sets;
  tx_sets.reserve(users);
  for (const Constellation& c : constellations)
    tx_sets.push_back(scheme.detector == DetectorType::beamformed_1d ? pam_equivalent(c)
                                                                     : c);

  std::vector<ReceiverContext> ctx;
  ctx.reserve(users);
  for (int k = 0; k < users; ++k) ctx.push_back(make_context(ch, scheme, tx_sets, k));

  std::vector<std::uniform_int_distribution<int>> draw_symbol;
  for (int k = 0; k < users; ++k)
    draw_symbol.emplace_back(0, tx_sets[k].order() - 1);
  std::normal_distribution<double> unit_gauss(0.0, 1.0);

  std::vector<long> errors(users, 0);
  std::vector<int> tx_index(users);
  for (long slot = 0; slot < n_symbols; ++slot) {
    if (interference == InterferenceModel::constellation) {
      for (int l = 0; l < users; ++l) tx_index[l] = draw_symbol[l](rng);
      for (int k = 0; k < users; ++k) {
        Eigen::Vector2d r = ctx[k].rx_noise *
                            Eigen::Vector2d(ctx[k].noise_std * unit_gauss(rng),
                                            ctx[k].noise_std * unit_gauss(rng));
        for (int l = 0; l < users; ++l)
          r.noalias() += ctx[k].eff[l] * tx_sets[l].symbols[tx_index[l]];
        if (detect(ctx[k], r) != tx_index[k]) ++errors[k];
      }
    } else {
      // each receiver sees its own Gaussian interferers
      for (int k = 0; k < users; ++k) {
        const int m = draw_symbol[k](rng);
        Eigen::Vector2d r = ctx[k].eff[k] * tx_sets[k].symbols[m];
        for (int l = 0; l < users; ++l) {
          if (l == k) continue;
          r.noalias() += ctx[k].eff[l] * Eigen::Vector2d(unit_gauss(rng), unit_gauss(rng));
        }
        r.noalias() += ctx[k].rx_noise *
                       Eigen::Vector2d(ctx[k].noise_std * unit_gauss(rng),
                                       ctx[k].noise_std * unit_gauss(rng));
        if (detect(ctx[k], r) != m) ++errors[k];
      }
    }
  }

  SimResult result;
  result.scheme = scheme.scheme;
  result.symbols_simulated = n_symbols;
  result.error_counts = errors;
  result.per_user_ser.resize(users);
  for (int k = 0; k < users; ++k)
    result.per_user_ser[k] = static_cast<double>(errors[k]) / n_symbols;
  result.max_ser = *std::max_element(result.per_user_ser.begin(),
                                     result.per_user_ser.end());
  return result;
}

namespace {

double run_pair_trials(const ChannelRealization& ch, const PrecoderSet& p,
                       const std::vector<Constellation>& constellations, int k,
                       long trials, Rng& rng, InterferenceModel interference,
                       const Eigen::Vector2d* fixed_d, const Eigen::Vector2d* fixed_dt) {
  const int users = ch.users;
  const Eigen::Matrix2d whitener = noise_covariance(ch, p, k).inv_sqrt;
  std::vector<Eigen::Matrix2d> eff(users);
  for (int l = 0; l < users; ++l) {
    const Eigen::Matrix2d j =
        l == k ? Eigen::Matrix2d::Identity() : rotation(relative_phase(ch, k, l));
    eff[l] = whitener.transpose() * (ch.magnitudes(k, l) * j * p.matrices[l]);
  }
  const double noise_std = std::sqrt(0.5 * ch.noise_powers[k]);
  std::normal_distribution<double> unit_gauss(0.0, 1.0);
  std::vector<std::uniform_int_distribution<int>> pick;
  for (int l = 0; l < users; ++l) pick.emplace_back(0, constellations[l].order() - 1);

  long errors = 0;
  for (long trial = 0; trial < trials; ++trial) {
    Eigen::Vector2d d, dt;
    if (fixed_d) {
      d = *fixed_d;
      dt = *fixed_dt;
    } else {
      int i = pick[k](rng), j = pick[k](rng);
      while (j == i) j = pick[k](rng);
      d = constellations[k].symbols[i];
      dt = constellations[k].symbols[j];
    }
    Eigen::Vector2d r = eff[k] * d;
    for (int l = 0; l < users; ++l) {
      if (l == k) continue;
      if (interference == InterferenceModel::gaussian) {
        r.noalias() += eff[l] * Eigen::Vector2d(unit_gauss(rng), unit_gauss(rng));
      } else {
        r.noalias() += eff[l] * constellations[l].symbols[pick[l](rng)];
      }
    }
    r.noalias() += whitener.transpose() *
                   Eigen::Vector2d(noise_std * unit_gauss(rng), noise_std * unit_gauss(rng));
    const Eigen::Vector2d s_d = eff[k] * d;
    const Eigen::Vector2d s_dt = eff[k] * dt;
    if ((r - s_dt).squaredNorm() <= (r - s_d).squaredNorm()) ++errors;
  }
  return static_cast<double>(errors) / trials;
}

}  // namespace

double simulate_pair_pep(const ChannelRealization& ch, const PrecoderSet& p,
                         const std::vector<Constellation>& constellations, int k,
                         const Eigen::Vector2d& d, const Eigen::Vector2d& dtilde,
                         long trials, Rng& rng, InterferenceModel interference) {
  return run_pair_trials(ch, p, constellations, k, trials, rng, interference, &d,
                         &dtilde);
}

double simulate_mean_pep(const ChannelRealization& ch, const PrecoderSet& p,
                         const std::vector<Constellation>& constellations, int k,
                         long trials, Rng& rng, InterferenceModel interference) {
  return run_pair_trials(ch, p, constellations, k, trials, rng, interference, nullptr,
                         nullptr);
}

Interval wilson_interval(long errors, long trials, double z) {
  Interval iv;
  if (trials <= 0) return iv;
  const double p = static_cast<double>(errors) / trials;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / trials;
  const double center = p + z2 / (2.0 * trials);
  const double spread = z * std::sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials));
  iv.low = std::max(0.0, (center - spread) / denom);
  iv.high = std::min(1.0, (center + spread) / denom);
  return iv;
}

}  // namespace icsig
