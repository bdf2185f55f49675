#include "icsig/constellation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "icsig/common.hpp"

namespace icsig {

namespace {

std::string canonical_label(std::string_view label) {
  std::string s;
  s.reserve(label.size());
  for (char c : label) {
    if (c == '-' || c == '_' || c == ' ') continue;
    s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  // accept both "8psk" and "psk8" spellings
  if (s == "psk8") s = "8psk";
  if (s == "qam16") s = "16qam";
  if (s == "pam4") s = "4pam";
  if (s == "pam8") s = "8pam";
  return s;
}

Constellation make_pam(int order) {
  // Levels +-(2i-1)*c with c chosen so the mean-square amplitude is 2.
  Constellation c;
  c.name = std::to_string(order) + "pam";
  c.dimensionality = 1;
  const double scale = std::sqrt(6.0 / (static_cast<double>(order) * order - 1.0));
  for (int i = 0; i < order; ++i) {
    const double level = (2.0 * i - (order - 1)) * scale;
    c.symbols.emplace_back(level, 0.0);
  }
  return c;
}

}  // namespace

Constellation build_constellation(std::string_view label) {
  const std::string name = canonical_label(label);
  Constellation c;
  c.name = name;
  if (name == "qpsk") {
    c.symbols = {{1.0, 1.0}, {1.0, -1.0}, {-1.0, -1.0}, {-1.0, 1.0}};
  } else if (name == "8psk") {
    const double r = std::numbers::sqrt2;
    c.symbols = {{0.0, r},  {1.0, 1.0},   {r, 0.0},  {1.0, -1.0},
                 {0.0, -r}, {-1.0, -1.0}, {-r, 0.0}, {-1.0, 1.0}};
  } else if (name == "16qam") {
    const double s = 1.0 / std::sqrt(5.0);
    for (double re : {-3.0, -1.0, 1.0, 3.0})
      for (double im : {-3.0, -1.0, 1.0, 3.0}) c.symbols.emplace_back(re * s, im * s);
  } else if (name == "4pam") {
    return make_pam(4);
  } else if (name == "8pam") {
    return make_pam(8);
  } else {
    throw ConfigError("unsupported constellation label '" + std::string(label) + "'",
                      "modulation");
  }
  return c;
}

Constellation pam_equivalent(const Constellation& c) {
  return make_pam(c.order());
}

Eigen::Matrix<double, Eigen::Dynamic, 2> DifferenceMatrix::as_matrix() const {
  Eigen::Matrix<double, Eigen::Dynamic, 2> m(rows.size(), 2);
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(i) = rows[i].transpose();
  return m;
}

DifferenceMatrix difference_matrix(const Constellation& c) {
  DifferenceMatrix f;
  const int m = c.order();
  f.rows.reserve(static_cast<std::size_t>(m) * (m - 1) / 2);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) f.rows.push_back(c.symbols[i] - c.symbols[j]);
  return f;
}

DifferenceMatrix reduce_difference_matrix(const DifferenceMatrix& full, double tol) {
  DifferenceMatrix q;
  q.reduced = true;
  for (const Eigen::Vector2d& row : full.rows) {
    bool merged = false;
    for (Eigen::Vector2d& rep : q.rows) {
      const double cross = std::abs(row.x() * rep.y() - row.y() * rep.x());
      if (cross <= tol * row.norm() * rep.norm()) {
        if (row.squaredNorm() < rep.squaredNorm()) rep = row;
        merged = true;
        break;
      }
    }
    if (!merged) q.rows.push_back(row);
  }
  return q;
}

}  // namespace icsig
