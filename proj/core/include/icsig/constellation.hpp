#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace icsig {

/// Normalized symbol set, represented as real 2-vectors. 2-D constellations
/// satisfy (1/M) sum d d^T = I; 1-D (PAM) sets live on the first axis with
/// mean-square amplitude 2, so total power matches the 2-D case.
struct Constellation {
  std::string name;
  std::vector<Eigen::Vector2d> symbols;
  int dimensionality = 2;

  int order() const { return static_cast<int>(symbols.size()); }
};

/// Supported labels: qpsk, 8psk, 16qam, 4pam, 8pam (case-insensitive, with
/// the psk8/qam16/pam4/pam8 spellings accepted too). Throws ConfigError on
/// anything else.
Constellation build_constellation(std::string_view label);

/// 1-D PAM set with the same symbol count and average transmit power as the
/// given 2-D constellation (used by the IA benchmark schemes).
Constellation pam_equivalent(const Constellation& c);

/// Stacked pairwise symbol differences d_i - d_j (rows). The full matrix has
/// one row per unordered pair, enumerated lexicographically with i < j.
struct DifferenceMatrix {
  std::vector<Eigen::Vector2d> rows;
  bool reduced = false;

  int count() const { return static_cast<int>(rows.size()); }
  Eigen::Matrix<double, Eigen::Dynamic, 2> as_matrix() const;
};

DifferenceMatrix difference_matrix(const Constellation& c);

/// Keeps one representative per collinearity class: the row of minimum norm,
/// in order of each class's first appearance. Two rows are collinear when
/// |cross(u,v)| <= tol * |u| * |v|.
DifferenceMatrix reduce_difference_matrix(const DifferenceMatrix& full,
                                          double tol = 1e-9);

}  // namespace icsig
