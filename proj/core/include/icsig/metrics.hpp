#pragma once

#include <vector>

#include <Eigen/Core>

#include "icsig/channel.hpp"
#include "icsig/constellation.hpp"

namespace icsig {

/// The K real 2x2 precoding matrices, one per user. Power feasibility means
/// trace(A_k A_k^T) <= P_k for the associated budget.
struct PrecoderSet {
  std::vector<Eigen::Matrix2d> matrices;

  int users() const { return static_cast<int>(matrices.size()); }

  /// Conventional proper signaling at full power: A_k = sqrt(P_k/2) I.
  static PrecoderSet proper(const ChannelRealization& ch);
  /// All-zero precoders (useful as a degenerate reference).
  static PrecoderSet zero(int users);
};

/// Interference-plus-noise covariance W_k of the derotated receive signal and
/// its inverse square root (the whitening receiver R_k = W_k^{-1/2}).
struct WhitenedReceiver {
  Eigen::Matrix2d covariance;
  Eigen::Matrix2d inv_sqrt;
};

/// Gaussian tail probability Q(x), computed through erfc for accuracy in the
/// deep-tail regime.
double qfunc(double x);
/// Standard normal density.
double normal_pdf(double x);

/// Inverse square root of a symmetric positive definite 2x2 matrix via its
/// closed-form eigendecomposition.
Eigen::Matrix2d sym_inv_sqrt(const Eigen::Matrix2d& spd);

/// W_k = (sigma_k^2/2) I + sum_{l != k} |h_kl|^2 J(phi_kl) A_l A_l^T J^T(phi_kl).
Eigen::Matrix2d interference_covariance(const ChannelRealization& ch,
                                        const PrecoderSet& p, int k);
WhitenedReceiver noise_covariance(const ChannelRealization& ch,
                                  const PrecoderSet& p, int k);

/// Pairwise error probability of decoding d as dtilde at receiver k under the
/// Gaussian-interference approximation and whitened Euclidean detection:
///   Q( |h_kk| sqrt( (d-dt)^T A_k^T W_k^{-1} A_k (d-dt) ) / 2 ).
double pep(const ChannelRealization& ch, const PrecoderSet& p, int k,
           const Eigen::Vector2d& d, const Eigen::Vector2d& dtilde);

enum class SerPrefactor {
  paper,         // 1/(M(M-1)) -- the averaging constant used by the source formula
  conventional,  // 1/M -- strict union bound
};

/// Union-bound symbol error rate surrogate for user k (sum of PEPs over all
/// ordered symbol pairs times the prefactor).
double union_bound_ser(const ChannelRealization& ch, const PrecoderSet& p, int k,
                       const Constellation& c,
                       SerPrefactor prefactor = SerPrefactor::paper);

/// Maximum PEP over the rows of a (typically reduced) difference matrix.
double worst_pep(const ChannelRealization& ch, const PrecoderSet& p, int k,
                 const DifferenceMatrix& rows);

}  // namespace icsig
