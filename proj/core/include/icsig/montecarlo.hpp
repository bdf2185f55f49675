#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "icsig/benchmarks.hpp"
#include "icsig/channel.hpp"
#include "icsig/constellation.hpp"
#include "icsig/metrics.hpp"

namespace icsig {

struct SimResult {
  std::vector<double> per_user_ser;
  double max_ser = 0.0;
  long symbols_simulated = 0;
  std::vector<long> error_counts;
  long realization_id = 0;
  std::string scheme;
};

enum class InterferenceModel {
  constellation,  // interferers transmit their actual symbol sets
  gaussian,       // interferers transmit N(0, I) vectors (PEP-validation mode)
};

/// Link-level symbol error simulation: per slot, draw uniform symbols for all
/// users, push them through the real-valued channel with per-component
/// N(0, sigma_k^2/2) noise, apply the scheme's receiver and detector, and
/// count errors per user. Detection ties go to the lowest symbol index.
SimResult simulate_ser(const ChannelRealization& ch, const SchemeOutput& scheme,
                       const std::vector<Constellation>& constellations,
                       long n_symbols, Rng& rng,
                       InterferenceModel interference = InterferenceModel::constellation);

/// Empirical pairwise error probability of the binary hypothesis test between
/// d and dtilde at receiver k under the whitening receiver. In constellation
/// mode the interferers draw from their own symbol sets.
double simulate_pair_pep(const ChannelRealization& ch, const PrecoderSet& p,
                         const std::vector<Constellation>& constellations, int k,
                         const Eigen::Vector2d& d, const Eigen::Vector2d& dtilde,
                         long trials, Rng& rng,
                         InterferenceModel interference = InterferenceModel::gaussian);

/// Mean PEP over uniformly drawn ordered symbol pairs of user k. The
/// analytical counterpart is union_bound_ser with the paper prefactor.
double simulate_mean_pep(const ChannelRealization& ch, const PrecoderSet& p,
                         const std::vector<Constellation>& constellations, int k,
                         long trials, Rng& rng,
                         InterferenceModel interference = InterferenceModel::gaussian);

/// Wilson score interval for an error proportion.
struct Interval {
  double low = 0.0;
  double high = 0.0;
};
Interval wilson_interval(long errors, long trials, double z = 1.96);

}  // namespace icsig
