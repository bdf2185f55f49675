#pragma once

#include <vector>

#include <Eigen/Core>

#include "icsig/channel.hpp"
#include "icsig/constellation.hpp"
#include "icsig/convex.hpp"
#include "icsig/metrics.hpp"

namespace icsig {

enum class Variant { pep, ser };

struct AlgoConfig {
  int max_outer_iterations = 100;
  double convergence_tol = 1e-5;  // scaled by sqrt(P_k), on the A and B changes
  Variant variant = Variant::pep;
};

struct AlternatingResult {
  PrecoderSet precoders;
  double objective = 0.0;            // worst PEP or worst union-bound SER
  std::vector<double> history;       // true metric per outer iteration (index 0 = init)
  int iterations = 0;
  bool converged = false;
  bool degraded = false;             // an inner solve failed; best iterate returned
};

/// Closed-form auxiliary update: B_k = |h_kk| W_k^{-1} A_k Rows^T, i.e.
/// B_k^T = |h_kk| Rows A_k^T ( sigma_k^2/2 I
///          + sum_{l != k} |h_kl|^2 J(phi_kl) A_l A_l^T J^T(phi_kl) )^{-1}.
/// Rows is Q_k for the PEP variant and F_k for the SER variant.
Eigen::Matrix2Xd closed_form_b(const ChannelRealization& ch, const PrecoderSet& p,
                               const DifferenceMatrix& rows, int k);

/// Auxiliary objective matrix for user k at arbitrary (A, B_k):
///   sum_{l != k} |h_kl|^2 B_k^T J A_l A_l^T J^T B_k
///     - |h_kk| (B_k^T A_k R^T + R A_k^T B_k) + sigma_k^2/2 B_k^T B_k.
Eigen::MatrixXd evaluate_g(const ChannelRealization& ch, const PrecoderSet& p,
                           const Eigen::Matrix2Xd& b, const DifferenceMatrix& rows,
                           int k);

/// Alternating minimization of the worst pairwise error probability over the
/// reduced difference rows (closed-form B step, then the convex precoder
/// subproblem), starting from proper signaling at full power.
AlternatingResult minmax_pep(const ChannelRealization& ch,
                             const std::vector<Constellation>& constellations,
                             const AlgoConfig& cfg = {});

/// Same drive over the full difference rows with per-row slacks, minimizing
/// the worst union-bound SER.
AlternatingResult minmax_ser(const ChannelRealization& ch,
                             const std::vector<Constellation>& constellations,
                             const AlgoConfig& cfg = {});

/// CSV replay format for precoder sets: user,a11,a12,a21,a22.
void save_precoders_csv(std::ostream& out, const PrecoderSet& p);
PrecoderSet load_precoders_csv(std::istream& in);

}  // namespace icsig
