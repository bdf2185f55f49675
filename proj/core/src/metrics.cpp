#include "icsig/metrics.hpp"

#include <cmath>
#include <numbers>

namespace icsig {

PrecoderSet PrecoderSet::proper(const ChannelRealization& ch) {
  PrecoderSet p;
  p.matrices.reserve(ch.users);
  for (int k = 0; k < ch.users; ++k)
    p.matrices.push_back(std::sqrt(ch.power_budgets[k] / 2.0) *
                         Eigen::Matrix2d::Identity());
  return p;
}

PrecoderSet PrecoderSet::zero(int users) {
  PrecoderSet p;
  p.matrices.assign(users, Eigen::Matrix2d::Zero());
  return p;
}

double qfunc(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

Eigen::Matrix2d sym_inv_sqrt(const Eigen::Matrix2d& spd) {
  // Analytic eigendecomposition of [[a, b], [b, c]], computed on a rescaled
  // copy so that cellular-scale covariances (entries ~1e-11) stay accurate.
  const double scale = spd.cwiseAbs().maxCoeff();
  const double a = spd(0, 0) / scale, c = spd(1, 1) / scale;
  const double b = 0.5 * (spd(0, 1) + spd(1, 0)) / scale;
  const double mean = 0.5 * (a + c);
  const double disc = std::hypot(0.5 * (a - c), b);
  const double l1 = mean + disc;
  const double l2 = mean - disc;
  Eigen::Vector2d v1;
  if (std::abs(b) > 1e-30) {
    v1 << l1 - c, b;
  } else if (a >= c) {
    v1 << 1.0, 0.0;
  } else {
    v1 << 0.0, 1.0;
  }
  v1.normalize();
  const Eigen::Vector2d v2(-v1.y(), v1.x());
  const double s1 = 1.0 / std::sqrt(l1 * scale);
  const double s2 = 1.0 / std::sqrt(l2 * scale);
  return s1 * v1 * v1.transpose() + s2 * v2 * v2.transpose();
}

Eigen::Matrix2d interference_covariance(const ChannelRealization& ch,
                                        const PrecoderSet& p, int k) {
  Eigen::Matrix2d w = 0.5 * ch.noise_powers[k] * Eigen::Matrix2d::Identity();
  for (int l = 0; l < ch.users; ++l) {
    if (l == k) continue;
    const Eigen::Matrix2d j = rotation(relative_phase(ch, k, l));
    const Eigen::Matrix2d ja = j * p.matrices[l];
    const double g = ch.magnitudes(k, l) * ch.magnitudes(k, l);
    w.noalias() += g * ja * ja.transpose();
  }
  w = 0.5 * (w + w.transpose());  // exact symmetry
  return w;
}

WhitenedReceiver noise_covariance(const ChannelRealization& ch,
                                  const PrecoderSet& p, int k) {
  WhitenedReceiver rx;
  rx.covariance = interference_covariance(ch, p, k);
  rx.inv_sqrt = sym_inv_sqrt(rx.covariance);
  return rx;
}

namespace {

double pep_from_quadform(double hkk, double quadform) {
  return qfunc(0.5 * hkk * std::sqrt(std::max(quadform, 0.0)));
}

}  // namespace

double pep(const ChannelRealization& ch, const PrecoderSet& p, int k,
           const Eigen::Vector2d& d, const Eigen::Vector2d& dtilde) {
  const Eigen::Matrix2d w = interference_covariance(ch, p, k);
  const Eigen::Matrix2d winv_sqrt = sym_inv_sqrt(w);
  const Eigen::Vector2d u = winv_sqrt * (p.matrices[k] * (d - dtilde));
  return pep_from_quadform(ch.magnitudes(k, k), u.squaredNorm());
}

double union_bound_ser(const ChannelRealization& ch, const PrecoderSet& p, int k,
                       const Constellation& c, SerPrefactor prefactor) {
  const Eigen::Matrix2d winv_sqrt = sym_inv_sqrt(interference_covariance(ch, p, k));
  const double hkk = ch.magnitudes(k, k);
  const int m = c.order();
  double sum = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const Eigen::Vector2d u =
          winv_sqrt * (p.matrices[k] * (c.symbols[i] - c.symbols[j]));
      sum += 2.0 * pep_from_quadform(hkk, u.squaredNorm());  // ordered pairs
    }
  const double denom = prefactor == SerPrefactor::paper
                           ? static_cast<double>(m) * (m - 1)
                           : static_cast<double>(m);
  return sum / denom;
}

double worst_pep(const ChannelRealization& ch, const PrecoderSet& p, int k,
                 const DifferenceMatrix& rows) {
  const Eigen::Matrix2d winv_sqrt = sym_inv_sqrt(interference_covariance(ch, p, k));
  const double hkk = ch.magnitudes(k, k);
  double worst = 0.0;
  for (const Eigen::Vector2d& row : rows.rows) {
    const Eigen::Vector2d u = winv_sqrt * (p.matrices[k] * row);
    worst = std::max(worst, pep_from_quadform(hkk, u.squaredNorm()));
  }
  return worst;
}

}  // namespace icsig
