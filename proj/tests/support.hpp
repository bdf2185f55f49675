#pragma once

#include <algorithm>
#include <vector>

#include <Eigen/Core>

#include "icsig/channel.hpp"
#include "icsig/constellation.hpp"
#include "icsig/metrics.hpp"

namespace icsig::test {

/// Compares two sets of 2-vectors as unordered multisets up to per-row sign.
inline bool same_rows_up_to_sign(std::vector<Eigen::Vector2d> a,
                                 std::vector<Eigen::Vector2d> b, double tol = 1e-12) {
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
    if ((a[i] - b[i]).lpNorm<Eigen::Infinity>() > tol) return false;
  return true;
}

/// Random power-feasible precoders: i.i.d. N(0,1) entries rescaled so that
/// trace(A_k A_k^T) = P_k (the random-precoder protocol of the PEP check).
inline PrecoderSet random_feasible_precoders(const ChannelRealization& ch, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  PrecoderSet p;
  for (int k = 0; k < ch.users; ++k) {
    Eigen::Matrix2d a;
    a << gauss(rng), gauss(rng), gauss(rng), gauss(rng);
    a *= std::sqrt(ch.power_budgets[k] / a.squaredNorm());
    p.matrices.push_back(a);
  }
  return p;
}

}  // namespace icsig::test
