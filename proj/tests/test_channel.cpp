#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include <Eigen/LU>

#include "icsig/channel.hpp"
#include "support.hpp"

using namespace icsig;

TEST_SUITE("channel") {

TEST_CASE("rotation basics") {
  CHECK((rotation(0.0) - Eigen::Matrix2d::Identity()).norm() == 0.0);
  Eigen::Matrix2d quarter;
  quarter << 0, -1, 1, 0;
  CHECK((rotation(std::numbers::pi / 2) - quarter).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("rotation is orthogonal with unit determinant and composes additively") {
  Rng rng(42);
  std::uniform_real_distribution<double> angle(-10.0, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = angle(rng), b = angle(rng);
    const Eigen::Matrix2d ja = rotation(a);
    CHECK((ja.transpose() * ja - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <=
          1e-12);
    CHECK(ja.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((rotation(a) * rotation(b) - rotation(a + b)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("real-valued view matches the complex product") {
  Rng rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  for (int trial = 0; trial < 100; ++trial) {
    const double mag = std::abs(gauss(rng)) + 0.1;
    const double theta = angle(rng);
    const Eigen::Vector2d x(gauss(rng), gauss(rng));
    const Eigen::Vector2d via_matrix = mag * rotation(theta) * x;
    const std::complex<double> h = std::polar(mag, theta);
    const std::complex<double> xz(x.x(), x.y());
    const std::complex<double> yz = h * xz;
    CHECK(via_matrix.x() == doctest::Approx(yz.real()).epsilon(1e-12));
    CHECK(via_matrix.y() == doctest::Approx(yz.imag()).epsilon(1e-12));
  }
}

TEST_CASE("relative phase") {
  ChannelRealization ch = fixed_channel(Eigen::MatrixXcd::Identity(2, 2));
  ch.phases(0, 0) = 0.25;
  ch.phases(0, 1) = 1.0;
  CHECK(relative_phase(ch, 0, 1) == doctest::Approx(0.75));
  ch.phases(1, 0) = ch.phases(1, 1);
  CHECK(relative_phase(ch, 1, 0) == 0.0);

  // rotation(relative_phase) == rotation(theta_kk)^T * rotation(theta_kl)
  Rng rng(3);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  for (int trial = 0; trial < 20; ++trial) {
    ch.phases(0, 0) = angle(rng);
    ch.phases(0, 1) = angle(rng);
    const Eigen::Matrix2d lhs = rotation(relative_phase(ch, 0, 1));
    const Eigen::Matrix2d rhs =
        rotation(ch.phases(0, 0)).transpose() * rotation(ch.phases(0, 1));
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("fixed two-user matrix") {
  Eigen::MatrixXcd h(2, 2);
  h << std::polar(1.9310, -2.0228), std::polar(0.7732, 0.5865),
       std::polar(0.9249, 3.0213), std::polar(2.3742, 0.2089);
  const ChannelRealization ch = fixed_channel(h);
  CHECK(ch.users == 2);
  CHECK(ch.magnitudes(0, 0) == doctest::Approx(1.9310));
  CHECK(ch.phases(0, 0) == doctest::Approx(-2.0228));
  CHECK(ch.magnitudes(1, 1) == doctest::Approx(2.3742));
  CHECK(ch.phases(1, 0) == doctest::Approx(3.0213));
  CHECK(ch.coefficient(0, 1) ==
        std::complex<double>(std::polar(0.7732, 0.5865)));
}

TEST_CASE("fixed three-user matrix includes h33") {
  Eigen::MatrixXcd h(3, 3);
  h.setIdentity();
  h(2, 2) = std::polar(2.1935, 1.7364);
  const ChannelRealization ch = fixed_channel(h);
  CHECK(ch.magnitudes(2, 2) == doctest::Approx(2.1935));
  CHECK(ch.phases(2, 2) == doctest::Approx(1.7364));
}

TEST_CASE("identity matrix maps to unit magnitudes and zero phases") {
  const ChannelRealization ch = fixed_channel(Eigen::MatrixXcd::Identity(3, 3));
  for (int k = 0; k < 3; ++k) {
    CHECK(ch.magnitudes(k, k) == 1.0);
    CHECK(ch.phases(k, k) == 0.0);
  }
  CHECK_THROWS_AS(fixed_channel(Eigen::MatrixXcd::Zero(2, 3)), ConfigError);
}

TEST_CASE("rayleigh draws have the right first and second moments") {
  Rng rng(2024);
  const int draws = 100000;
  double sum_mag2 = 0.0;
  std::complex<double> sum{0.0, 0.0};
  std::vector<double> phases;
  phases.reserve(draws);
  for (int i = 0; i < draws / 4; ++i) {
    const ChannelRealization ch = rayleigh_channel(2, rng);
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l) {
        sum_mag2 += ch.magnitudes(k, l) * ch.magnitudes(k, l);
        sum += ch.coefficient(k, l);
        phases.push_back(ch.phases(k, l));
      }
  }
  const double n = static_cast<double>(phases.size());
  CHECK(sum_mag2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::abs(sum.real() / n) < 0.02);
  CHECK(std::abs(sum.imag() / n) < 0.02);

  // Kolmogorov-Smirnov statistic against the uniform CDF on [-pi, pi)
  std::sort(phases.begin(), phases.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const double cdf = (phases[i] + std::numbers::pi) / (2 * std::numbers::pi);
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i + 1) / n));
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
  }
  CHECK(ks < 0.02);

  for (int k = 0; k < 2; ++k) {
    const ChannelRealization ch = rayleigh_channel(2, rng);
    CHECK(ch.noise_powers[k] > 0.0);
    CHECK(ch.power_budgets[k] > 0.0);
  }
}

TEST_CASE("cellular parameters") {
  // path loss at 1 km with exponent 3.7
  const Eigen::MatrixXd d = cellular_distances(CellGeometry::two_cell);
  CHECK(d(0, 0) == doctest::Approx(1000.0));
  CHECK(d(0, 1) == doctest::Approx(1000.0));
  const double pathloss_db = 10.0 * std::log10(std::pow(d(0, 0), -3.7));
  CHECK(pathloss_db == doctest::Approx(-111.0));

  Rng rng(5);
  const ChannelRealization ch = cellular_channel(CellGeometry::two_cell, 30.0, rng);
  // noise power: -174 dBm/Hz over 10 MHz = -104 dBm
  CHECK(linear_to_db(ch.noise_powers[0]) == doctest::Approx(-104.0));
  CHECK(ch.power_budgets[0] == doctest::Approx(db_to_linear(30.0)));

  CHECK_THROWS_AS(cellular_channel(CellGeometry::two_cell, 60.0, rng), ConfigError);
  CHECK_THROWS_AS(cellular_channel(CellGeometry::two_cell, 5.0, rng), ConfigError);

  // three-cell geometry: direct distance R, symmetric cross distances
  const Eigen::MatrixXd d3 = cellular_distances(CellGeometry::three_cell);
  for (int k = 0; k < 3; ++k) CHECK(d3(k, k) == doctest::Approx(1000.0));
  const double cross = d3(0, 1);
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l)
      if (k != l) CHECK(d3(k, l) == doctest::Approx(cross).epsilon(1e-9));
  CHECK(cross == doctest::Approx(1000.0 * std::sqrt(5.0 - 2.0 * std::sqrt(3.0))));

  // mean direct-link SNR map: 57 dBm -> 50 dB
  CHECK(mean_direct_snr_db(CellGeometry::two_cell, 57.0) == doctest::Approx(50.0));
}

TEST_CASE("channel csv round trip") {
  Rng rng(11);
  std::vector<ChannelRealization> ensemble = {rayleigh_channel(2, rng),
                                              rayleigh_channel(3, rng)};
  std::stringstream ss;
  save_channels_csv(ss, ensemble);
  const std::vector<ChannelRealization> back = load_channels_csv(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[0].users == 2);
  CHECK(back[1].users == 3);
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    CHECK((back[i].magnitudes - ensemble[i].magnitudes).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back[i].phases - ensemble[i].phases).cwiseAbs().maxCoeff() == 0.0);
  }
}

}  // TEST_SUITE
