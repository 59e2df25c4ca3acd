#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "geophase/detail/format.hpp"

namespace geophase {

/**
 * Uniform sampling grid centred on zero. Points sit at (i - n/2) * step with
 * step = 2 * half_width / n, so zero itself is a grid node for even n and the
 * samples cover [-half_width, half_width).
 */
struct GridSpec {
  int points = 0;
  double half_width = 0.0;

  GridSpec() = default;
  GridSpec(int points_, double half_width_) : points(points_), half_width(half_width_) {
    if (points < 2) {
      throw std::invalid_argument("GridSpec: need at least 2 points");
    }
    if (!(half_width > 0.0)) {
      throw std::invalid_argument("GridSpec: half_width must be positive");
    }
  }

  double step() const { return 2.0 * half_width / points; }
  double coord(int i) const { return (i - points / 2) * step(); }
};

/** Wigner quasi-probability distribution sampled on a rectangular grid. */
struct WignerField {
  GridSpec x_axis;
  GridSpec p_axis;
  Eigen::MatrixXd values;  // values(i, j) = W(x_i, p_j)

  WignerField(GridSpec x, GridSpec p)
      : x_axis(x), p_axis(p), values(Eigen::MatrixXd::Zero(x.points, p.points)) {}

  double cell_area() const { return x_axis.step() * p_axis.step(); }

  /** Riemann sum of W over the grid; close to 1 for well-contained states. */
  double riemann_sum() const { return values.sum() * cell_area(); }
};

/** Volume of the negative part of W: sum of (|W| - W)/2 over the grid. */
inline double negativity_volume(const WignerField& field) {
  double acc = 0.0;
  const auto& w = field.values;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      if (w(i, j) < 0.0) {
        acc -= w(i, j);
      }
    }
  }
  return acc * field.cell_area();
}

/**
 * CSV export: header "x,p,w", one row per grid node, row-major in x,
 * 17-significant-digit decimal floats.
 */
inline void write_csv(const WignerField& field, std::ostream& os) {
  os << "x,p,w\n";
  for (int i = 0; i < field.x_axis.points; ++i) {
    const double x = field.x_axis.coord(i);
    for (int j = 0; j < field.p_axis.points; ++j) {
      os << detail::format_sig17(x) << ',' << detail::format_sig17(field.p_axis.coord(j)) << ','
         << detail::format_sig17(field.values(i, j)) << '\n';
    }
  }
}

}  // namespace geophase
