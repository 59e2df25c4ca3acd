#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "geophase/detail/parallel.hpp"
#include "geophase/wigner_field.hpp"

namespace geophase {

namespace detail {

/** Standard symplectic form for (X1, P1, X2, P2, ...) quadrature ordering. */
inline Eigen::MatrixXd symplectic_form(int n_modes) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int m = 0; m < n_modes; ++m) {
    omega(2 * m, 2 * m + 1) = 1.0;
    omega(2 * m + 1, 2 * m) = -1.0;
  }
  return omega;
}

}  // namespace detail

/**
 * Gaussian state of one or two bosonic modes in (X1, P1, X2, P2) quadrature
 * ordering, with X = (b + b†)/√2 and [X, P] = i, so the vacuum has variance
 * 1/2 in every quadrature. cov(i, j) = ⟨{δR_i, δR_j}⟩/2.
 *
 * Construction symmetrises the covariance (asymmetry beyond 1e-12 is
 * rejected) and enforces the Heisenberg bound cov + (i/2)Ω ⪰ 0 up to a
 * -1e-10 eigenvalue floor.
 */
class GaussianState {
 public:
  GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov)
      : mean_(std::move(mean)), cov_(std::move(cov)) {
    const Eigen::Index dim = mean_.size();
    if (dim != 2 && dim != 4) {
      throw std::invalid_argument("GaussianState: supports 1 or 2 modes");
    }
    if (cov_.rows() != dim || cov_.cols() != dim) {
      throw std::invalid_argument("GaussianState: covariance dimension mismatch");
    }
    if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      throw std::invalid_argument("GaussianState: covariance not symmetric");
    }
    cov_ = ((cov_ + cov_.transpose()) / 2.0).eval();

    const Eigen::MatrixXd omega = detail::symplectic_form(n_modes());
    Eigen::MatrixXcd bound = cov_.cast<std::complex<double>>();
    bound += std::complex<double>(0.0, 0.5) * omega.cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(bound, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-10) {
      throw std::invalid_argument("GaussianState: covariance violates the Heisenberg bound");
    }
  }

  static GaussianState vacuum(int n_modes = 1) {
    if (n_modes != 1 && n_modes != 2) {
      throw std::invalid_argument("GaussianState::vacuum: supports 1 or 2 modes");
    }
    return GaussianState(Eigen::VectorXd::Zero(2 * n_modes),
                         0.5 * Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
  }

  int n_modes() const { return static_cast<int>(mean_.size()) / 2; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& cov() const { return cov_; }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
};

/** Single-mode thermal state with mean occupation nbar: cov = (nbar + 1/2) I. */
inline GaussianState make_thermal(double nbar) {
  if (nbar < 0.0 || !std::isfinite(nbar)) {
    throw std::invalid_argument("make_thermal: nbar must be a nonnegative real");
  }
  return GaussianState(Eigen::Vector2d::Zero(), (nbar + 0.5) * Eigen::Matrix2d::Identity());
}

/**
 * Linear phase-space map R -> matrix * R + displacement. Every Gaussian
 * unitary of the protocol is carried in this form. Construction checks the
 * symplectic condition SᵀΩS = Ω to 1e-10.
 */
class SymplecticMap {
 public:
  SymplecticMap(Eigen::MatrixXd matrix, Eigen::VectorXd displacement)
      : matrix_(std::move(matrix)), displacement_(std::move(displacement)) {
    const Eigen::Index dim = matrix_.rows();
    if (dim != matrix_.cols() || dim % 2 != 0 || dim == 0) {
      throw std::invalid_argument("SymplecticMap: matrix must be square with even dimension");
    }
    if (displacement_.size() != dim) {
      throw std::invalid_argument("SymplecticMap: displacement dimension mismatch");
    }
    const Eigen::MatrixXd omega = detail::symplectic_form(static_cast<int>(dim) / 2);
    const double defect =
        (matrix_.transpose() * omega * matrix_ - omega).cwiseAbs().maxCoeff();
    if (defect > 1e-10) {
      throw std::invalid_argument("SymplecticMap: matrix is not symplectic");
    }
  }

  explicit SymplecticMap(Eigen::MatrixXd matrix)
      : SymplecticMap(std::move(matrix), Eigen::VectorXd::Zero(matrix.rows())) {}

  static SymplecticMap identity(int n_modes) {
    return SymplecticMap(Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
  }

  int n_modes() const { return static_cast<int>(matrix_.rows()) / 2; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const Eigen::VectorXd& displacement() const { return displacement_; }

 private:
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd displacement_;
};

/** Position-quadratic phase gate on one mode: X -> X, P -> P - 2*chi2*X. */
inline SymplecticMap shear_from_chi2(double chi2) {
  Eigen::Matrix2d s = Eigen::Matrix2d::Identity();
  s(1, 0) = -2.0 * chi2;
  return SymplecticMap(s);
}

/** mean -> S mean + d, cov -> S cov Sᵀ (resymmetrised by construction). */
inline GaussianState apply_symplectic(const GaussianState& state, const SymplecticMap& map) {
  if (map.n_modes() != state.n_modes()) {
    throw std::invalid_argument("apply_symplectic: mode count mismatch");
  }
  const Eigen::MatrixXd& s = map.matrix();
  Eigen::MatrixXd cov = s * state.cov() * s.transpose();
  cov = ((cov + cov.transpose()) / 2.0).eval();
  return GaussianState(s * state.mean() + map.displacement(), cov);
}

/** Marginal (partial trace) of one mode of a multimode Gaussian state. */
inline GaussianState extract_mode(const GaussianState& state, int mode) {
  if (mode < 0 || mode >= state.n_modes()) {
    throw std::invalid_argument("extract_mode: mode index out of range");
  }
  const int k = 2 * mode;
  return GaussianState(state.mean().segment<2>(k), state.cov().block<2, 2>(k, k));
}

struct QuadratureExtremum {
  double variance = 0.0;
  double angle = 0.0;  // radians from the X axis, in [0, pi)
};

/**
 * Smallest variance over quadratures X cosθ + P sinθ of a single-mode state,
 * together with its angle. Ties (isotropic covariance) resolve to θ = 0.
 */
inline QuadratureExtremum min_variance_and_angle(const GaussianState& state) {
  if (state.n_modes() != 1) {
    throw std::invalid_argument("min_variance_and_angle: single-mode states only");
  }
  const double a = state.cov()(0, 0);
  const double b = state.cov()(1, 1);
  const double c = state.cov()(0, 1);
  const double radius = std::hypot(0.5 * (a - b), c);
  const double lambda_min = 0.5 * (a + b) - radius;
  if (radius <= 1e-14 * std::max(1.0, std::abs(a) + std::abs(b))) {
    return {lambda_min, 0.0};
  }
  // Null vector of (cov - lambda_min I); pick the better-conditioned residual.
  const Eigen::Vector2d v1(c, lambda_min - a);
  const Eigen::Vector2d v2(lambda_min - b, c);
  const Eigen::Vector2d v = v1.norm() >= v2.norm() ? v1 : v2;
  double theta = std::atan2(v.y(), v.x());
  const double pi = std::numbers::pi;
  theta = std::fmod(theta, pi);
  if (theta < 0.0) {
    theta += pi;
  }
  if (theta >= pi) {
    theta -= pi;
  }
  return {lambda_min, theta};
}

/** Variance of the quadrature X cosθ + P sinθ. */
inline double variance_along(const GaussianState& state, double theta) {
  if (state.n_modes() != 1) {
    throw std::invalid_argument("variance_along: single-mode states only");
  }
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const auto& cov = state.cov();
  return c * c * cov(0, 0) + 2.0 * c * s * cov(0, 1) + s * s * cov(1, 1);
}

/**
 * Wigner function of a single-mode Gaussian state on a rectangular grid:
 * W(x, p) = exp(-δᵀ cov⁻¹ δ / 2) / (2π √det cov) with δ = (x, p) - mean.
 */
inline WignerField gaussian_wigner(const GaussianState& state, const GridSpec& x_axis,
                                   const GridSpec& p_axis) {
  if (state.n_modes() != 1) {
    throw std::invalid_argument("gaussian_wigner: single-mode states only");
  }
  const auto& cov = state.cov();
  const double det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(1, 0);
  if (det < 1e-300) {
    throw std::domain_error("gaussian_wigner: singular covariance");
  }
  const double inv00 = cov(1, 1) / det;
  const double inv11 = cov(0, 0) / det;
  const double inv01 = -cov(0, 1) / det;
  const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));
  const double mx = state.mean()(0);
  const double mp = state.mean()(1);

  WignerField field(x_axis, p_axis);
  detail::parallel_for(0, x_axis.points, [&](std::ptrdiff_t i) {
    const double dx = x_axis.coord(static_cast<int>(i)) - mx;
    for (int j = 0; j < p_axis.points; ++j) {
      const double dp = p_axis.coord(j) - mp;
      const double q = inv00 * dx * dx + 2.0 * inv01 * dx * dp + inv11 * dp * dp;
      field.values(i, j) = norm * std::exp(-0.5 * q);
    }
  });
  return field;
}

}  // namespace geophase
