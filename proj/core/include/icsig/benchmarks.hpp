#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "icsig/channel.hpp"
#include "icsig/constellation.hpp"
#include "icsig/metrics.hpp"

namespace icsig {

enum class DetectorType {
  whitened_euclidean,  // r = W^{-1/2} J^T y, nearest |h| R^T A d
  identity_euclidean,  // r = J^T y, nearest |h| A d
  mse_euclidean,       // r = R^T J^T y, nearest constellation symbol
  beamformed_1d,       // scalar u^T J^T y, nearest PAM level
};

struct SchemeOutput {
  PrecoderSet precoders;
  std::vector<Eigen::Matrix2d> receivers;  // R_k (rank-1 with u in column 0 for IA)
  std::string scheme;
  DetectorType detector = DetectorType::whitened_euclidean;
  std::vector<double> history;  // per-iteration objective of the designing loop
  double total_leakage = 0.0;   // IA schemes
  bool degraded = false;
};

/// Proper signaling with per-user transmit power control: A_k = sqrt(p_k/2) I,
/// R_k = I, exhaustive grid p_k in {P_k i/G} minimizing the worst union-bound
/// SER (coordinate descent above three users).
SchemeOutput ps_pc(const ChannelRealization& ch,
                   const std::vector<Constellation>& constellations,
                   int grid_points = 50,
                   SerPrefactor prefactor = SerPrefactor::paper);

/// MSE matrix E_k = E[(r_k - d_k)(r_k - d_k)^T] for given precoders/receivers.
Eigen::Matrix2d mse_matrix(const ChannelRealization& ch, const PrecoderSet& p,
                           const std::vector<Eigen::Matrix2d>& receivers, int k);

struct MseConfig {
  int max_iterations = 200;
  double tol = 1e-11;  // relative change of the objective
};

/// Alternating linear-MMSE receivers / convex precoder update minimizing the
/// sum of the MSE traces.
SchemeOutput minsum_mse(const ChannelRealization& ch, const MseConfig& cfg = {});
/// Same alternation minimizing the largest per-stream MSE.
SchemeOutput minmax_mse(const ChannelRealization& ch, const MseConfig& cfg = {});

struct IaConfig {
  int max_iterations = 500;
  double tol = 1e-10;  // absolute change of total leakage / beamformers
};

/// Interference leakage minimization with 1-D streams: alternating least
/// eigenvector updates of the transmit/receive beamformers.
SchemeOutput min_il_ia(const ChannelRealization& ch, const IaConfig& cfg = {});
/// Per-user SINR-maximizing (MMSE-direction) forward-reverse iteration,
/// started from the leakage-minimizing solution.
SchemeOutput max_sinr_ia(const ChannelRealization& ch, const IaConfig& cfg = {});

/// Post-combining SINR of user k for a beamformed (IA-style) scheme output.
double ia_sinr(const ChannelRealization& ch, const SchemeOutput& out, int k);
/// Total post-combining interference leakage of a beamformed scheme output.
double ia_total_leakage(const ChannelRealization& ch, const SchemeOutput& out);

}  // namespace icsig
