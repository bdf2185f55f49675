#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "icsig/common.hpp"

namespace icsig {

/// A K-user SISO interference channel instance in polar form, together with
/// the per-user noise powers and transmit power budgets. The complex
/// coefficient between transmitter l and receiver k is
/// magnitudes(k,l) * exp(j * phases(k,l)).
struct ChannelRealization {
  int users = 0;
  Eigen::MatrixXd magnitudes;    // |h_kl| >= 0
  Eigen::MatrixXd phases;        // theta_kl, radians
  Eigen::VectorXd noise_powers;  // sigma_k^2 > 0
  Eigen::VectorXd power_budgets; // P_k > 0

  std::complex<double> coefficient(int k, int l) const {
    return std::polar(magnitudes(k, l), phases(k, l));
  }
  double snr(int k) const { return power_budgets[k] / noise_powers[k]; }
};

/// 2x2 rotation J(theta) = [[cos, -sin], [sin, cos]]. Multiplying a real
/// 2-vector by |h| * J(theta) is the real-valued view of multiplying the
/// corresponding complex scalar by h = |h| e^{j theta}.
Eigen::Matrix2d rotation(double theta);

/// phi_kl = theta_kl - theta_kk, the residual rotation seen by receiver k on
/// the path from transmitter l after the receive derotation J^T(theta_kk).
double relative_phase(const ChannelRealization& ch, int k, int l);

/// Wraps a square complex coefficient matrix. Noise powers and budgets are
/// initialized to 1; callers set the operating point afterwards.
ChannelRealization fixed_channel(const Eigen::MatrixXcd& coeffs);

/// All K^2 coefficients i.i.d. CN(0,1).
ChannelRealization rayleigh_channel(int users, Rng& rng);

enum class CellGeometry { two_cell, three_cell };

struct CellularParams {
  double cell_radius_m = 1000.0;
  double pathloss_exponent = 3.7;
  double bandwidth_hz = 1e7;
  double noise_dbm_per_hz = -174.0;
  double min_tx_power_dbm = 7.0;
  double max_tx_power_dbm = 57.0;
};

/// Cell-edge interference geometry: base stations 2R apart (two_cell) or on
/// an equilateral triangle of side 2R (three_cell); each user sits at
/// distance R from its own base station, on the inter-cell axis (two_cell)
/// or towards the centroid (three_cell). Composite gain is
/// d^(-mu) * |g|^2 with g ~ CN(0,1); powers are in mW internally.
ChannelRealization cellular_channel(CellGeometry geometry, double tx_power_dbm,
                                    Rng& rng, const CellularParams& params = {});

/// Pairwise distances (meters) of the cellular layout, row k = receiver.
Eigen::MatrixXd cellular_distances(CellGeometry geometry,
                                   const CellularParams& params = {});

/// Deterministic tx-power -> SNR map for reporting: direct-link SNR with the
/// fading averaged out (E|g|^2 = 1).
double mean_direct_snr_db(CellGeometry geometry, double tx_power_dbm,
                          const CellularParams& params = {});

/// Sets sigma_k^2 = 1 and P_k = 10^(snr_db/10) for every user.
void set_equal_snr_db(ChannelRealization& ch, double snr_db);

/// Columnar replay format, one row per entry: k,l,magnitude,phase. Multiple
/// realizations are separated by their index in the first column group.
void save_channels_csv(std::ostream& out, const std::vector<ChannelRealization>& ensemble);
std::vector<ChannelRealization> load_channels_csv(std::istream& in);

}  // namespace icsig
