#include "icsig/channel.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace icsig {

Eigen::Matrix2d rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2d j;
  j << c, -s, s, c;
  return j;
}

double relative_phase(const ChannelRealization& ch, int k, int l) {
  return ch.phases(k, l) - ch.phases(k, k);
}

namespace {

ChannelRealization blank(int users) {
  ChannelRealization ch;
  ch.users = users;
  ch.magnitudes = Eigen::MatrixXd::Zero(users, users);
  ch.phases = Eigen::MatrixXd::Zero(users, users);
  ch.noise_powers = Eigen::VectorXd::Ones(users);
  ch.power_budgets = Eigen::VectorXd::Ones(users);
  return ch;
}

}  // namespace

ChannelRealization fixed_channel(const Eigen::MatrixXcd& coeffs) {
  if (coeffs.rows() != coeffs.cols())
    throw ConfigError("channel coefficient matrix must be square", "channel");
  ChannelRealization ch = blank(static_cast<int>(coeffs.rows()));
  for (int k = 0; k < ch.users; ++k)
    for (int l = 0; l < ch.users; ++l) {
      ch.magnitudes(k, l) = std::abs(coeffs(k, l));
      ch.phases(k, l) = std::arg(coeffs(k, l));
    }
  return ch;
}

ChannelRealization rayleigh_channel(int users, Rng& rng) {
  ChannelRealization ch = blank(users);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  for (int k = 0; k < users; ++k)
    for (int l = 0; l < users; ++l) {
      const std::complex<double> h(gauss(rng), gauss(rng));
      ch.magnitudes(k, l) = std::abs(h);
      ch.phases(k, l) = std::arg(h);
    }
  return ch;
}

Eigen::MatrixXd cellular_distances(CellGeometry geometry, const CellularParams& params) {
  const double r = params.cell_radius_m;
  std::vector<Eigen::Vector2d> bs, ue;
  if (geometry == CellGeometry::two_cell) {
    bs = {{0.0, 0.0}, {2.0 * r, 0.0}};
    // users at their own cell edge on the inter-cell axis
    ue = {{r, 0.0}, {r, 0.0}};
  } else {
    const double h = std::sqrt(3.0) * r;
    bs = {{0.0, 0.0}, {2.0 * r, 0.0}, {r, h}};
    const Eigen::Vector2d centroid(r, h / 3.0);
    for (const auto& b : bs) ue.push_back(b + r * (centroid - b).normalized());
  }
  const int users = static_cast<int>(bs.size());
  Eigen::MatrixXd d(users, users);
  for (int k = 0; k < users; ++k)
    for (int l = 0; l < users; ++l) d(k, l) = (ue[k] - bs[l]).norm();
  return d;
}

ChannelRealization cellular_channel(CellGeometry geometry, double tx_power_dbm,
                                    Rng& rng, const CellularParams& params) {
  if (tx_power_dbm < params.min_tx_power_dbm || tx_power_dbm > params.max_tx_power_dbm)
    throw ConfigError("tx power must lie in [" + std::to_string(params.min_tx_power_dbm) +
                          ", " + std::to_string(params.max_tx_power_dbm) + "] dBm",
                      "tx_power_dbm");
  const Eigen::MatrixXd dist = cellular_distances(geometry, params);
  const int users = static_cast<int>(dist.rows());
  ChannelRealization ch = blank(users);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  for (int k = 0; k < users; ++k)
    for (int l = 0; l < users; ++l) {
      const std::complex<double> g(gauss(rng), gauss(rng));
      const double pathloss = std::pow(dist(k, l), -params.pathloss_exponent);
      const std::complex<double> h = std::sqrt(pathloss) * g;
      ch.magnitudes(k, l) = std::abs(h);
      ch.phases(k, l) = std::arg(h);
    }
  const double noise_dbm =
      params.noise_dbm_per_hz + linear_to_db(params.bandwidth_hz);
  ch.noise_powers.setConstant(db_to_linear(noise_dbm));      // mW
  ch.power_budgets.setConstant(db_to_linear(tx_power_dbm));  // mW
  return ch;
}

double mean_direct_snr_db(CellGeometry geometry, double tx_power_dbm,
                          const CellularParams& params) {
  const Eigen::MatrixXd dist = cellular_distances(geometry, params);
  const double noise_dbm = params.noise_dbm_per_hz + linear_to_db(params.bandwidth_hz);
  // all direct links have the same distance by construction; use user 0
  const double pathloss_db = -10.0 * params.pathloss_exponent * std::log10(dist(0, 0));
  return tx_power_dbm + pathloss_db - noise_dbm;
}

void set_equal_snr_db(ChannelRealization& ch, double snr_db) {
  ch.noise_powers.setOnes();
  ch.power_budgets.setConstant(db_to_linear(snr_db));
}

void save_channels_csv(std::ostream& out, const std::vector<ChannelRealization>& ensemble) {
  out << "k,l,magnitude,phase\n";
  char buf[96];
  for (const ChannelRealization& ch : ensemble)
    for (int k = 0; k < ch.users; ++k)
      for (int l = 0; l < ch.users; ++l) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g\n", k, l,
                      ch.magnitudes(k, l), ch.phases(k, l));
        out << buf;
      }
}

std::vector<ChannelRealization> load_channels_csv(std::istream& in) {
  std::vector<ChannelRealization> ensemble;
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::array<double, 4>> entries;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<double, 4> e{};
    std::istringstream ss(line);
    char comma;
    if (!(ss >> e[0] >> comma >> e[1] >> comma >> e[2] >> comma >> e[3]))
      throw ConfigError("malformed channel CSV line: " + line, "channel_csv");
    entries.push_back(e);
  }
  std::size_t pos = 0;
  while (pos < entries.size()) {
    // a realization restarts when (k,l) wraps to (0,0); K inferred from the
    // largest index before the wrap
    std::size_t end = pos + 1;
    while (end < entries.size() && !(entries[end][0] == 0 && entries[end][1] == 0)) ++end;
    const int users = static_cast<int>(entries[end - 1][0]) + 1;
    if (end - pos != static_cast<std::size_t>(users) * users)
      throw ConfigError("channel CSV block is not a full KxK matrix", "channel_csv");
    ChannelRealization ch = blank(users);
    for (std::size_t i = pos; i < end; ++i) {
      const int k = static_cast<int>(entries[i][0]);
      const int l = static_cast<int>(entries[i][1]);
      ch.magnitudes(k, l) = entries[i][2];
      ch.phases(k, l) = entries[i][3];
    }
    ensemble.push_back(std::move(ch));
    pos = end;
  }
  return ensemble;
}

}  // namespace icsig
