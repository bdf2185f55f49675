// Writes the frozen solver-golden instances (tests/golden/instances.json).
// The reference objectives in golden.json are produced once by
// tests/golden/gen_golden.py from this dump; both files are committed.

#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "icsig/algorithms.hpp"

using namespace icsig;

namespace {

nlohmann::json dump_instance(const char* kind, const ChannelRealization& ch,
                             const std::vector<DifferenceMatrix>& rows,
                             const std::vector<Eigen::Matrix2Xd>& b) {
  nlohmann::json j;
  j["kind"] = kind;
  j["users"] = ch.users;
  for (int k = 0; k < ch.users; ++k) {
    j["noise"].push_back(ch.noise_powers[k]);
    j["budget"].push_back(ch.power_budgets[k]);
    nlohmann::json mag_row, phase_row;
    for (int l = 0; l < ch.users; ++l) {
      mag_row.push_back(ch.magnitudes(k, l));
      phase_row.push_back(ch.phases(k, l));
    }
    j["magnitude"].push_back(mag_row);
    j["phase"].push_back(phase_row);
    nlohmann::json rows_k, b_k;
    for (int i = 0; i < rows[k].count(); ++i) {
      rows_k.push_back({rows[k].rows[i].x(), rows[k].rows[i].y()});
      b_k.push_back({b[k](0, i), b[k](1, i)});
    }
    j["rows"].push_back(rows_k);
    j["b"].push_back(b_k);
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string out_path = argc > 1 ? argv[1] : "instances.json";
  nlohmann::json instances = nlohmann::json::array();

  for (int idx = 0; idx < 10; ++idx) {
    const bool is_ps1 = idx < 5;
    Rng rng = derive_stream(424242, idx);
    ChannelRealization ch = rayleigh_channel(2, rng);
    set_equal_snr_db(ch, 5.0 + 2.5 * (idx % 5));

    std::vector<Constellation> cs;
    cs.push_back(build_constellation(idx % 2 ? "8psk" : "qpsk"));
    cs.push_back(build_constellation(idx % 3 ? "qpsk" : "8psk"));

    std::vector<DifferenceMatrix> rows;
    for (const Constellation& c : cs) {
      const DifferenceMatrix f = difference_matrix(c);
      rows.push_back(is_ps1 ? reduce_difference_matrix(f) : f);
    }

    // auxiliaries from the closed-form update at a random feasible precoder
    std::normal_distribution<double> gauss(0.0, 1.0);
    PrecoderSet p;
    for (int k = 0; k < 2; ++k) {
      Eigen::Matrix2d a;
      a << gauss(rng), gauss(rng), gauss(rng), gauss(rng);
      a *= std::sqrt(ch.power_budgets[k] / a.squaredNorm());
      p.matrices.push_back(a);
    }
    std::vector<Eigen::Matrix2Xd> b;
    for (int k = 0; k < 2; ++k) b.push_back(closed_form_b(ch, p, rows[k], k));

    instances.push_back(dump_instance(is_ps1 ? "ps1" : "ps2", ch, rows, b));
  }

  std::ofstream out(out_path);
  out << instances.dump(1) << "\n";
  std::cout << "wrote " << out_path << " (" << instances.size() << " instances)\n";
  return 0;
}
