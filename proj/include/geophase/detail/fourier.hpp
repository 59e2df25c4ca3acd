#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace geophase::detail {

/**
 * Continuum Fourier pair on centred grids, x_j = (j - n/2) dx and
 * p_k = (k - n/2) dp with dp = 2*pi/(n dx):
 *   psi~(p_k) = dx/sqrt(2 pi) * sum_j psi(x_j) exp(-i p_k x_j)
 * Preserves the Riemann norm (discrete Parseval), so |psi~|^2 dp is the
 * momentum distribution of a normalised wavefunction.
 */
class SpectralTransform {
 public:
  SpectralTransform(int points, double step) : n_(points), dx_(step) {
    if (points < 2 || points % 2 != 0) {
      throw std::invalid_argument("SpectralTransform: need an even number of points");
    }
    if (!(step > 0.0)) {
      throw std::invalid_argument("SpectralTransform: step must be positive");
    }
    dp_ = 2.0 * std::numbers::pi / (n_ * dx_);
  }

  int points() const { return n_; }
  double dp() const { return dp_; }
  double p_coord(int k) const { return (k - n_ / 2) * dp_; }

  Eigen::VectorXcd forward(const Eigen::VectorXcd& psi) const {
    // p_k x_j = (2 pi / n) k' j' with k' = k - n/2, j' = j - n/2, so the
    // centred transform is a plain DFT evaluated at shifted index with an
    // alternating sign: psi~_k = scale * (-1)^{k'} * DFT[psi]_{k' mod n}.
    std::vector<std::complex<double>> in(psi.data(), psi.data() + n_);
    std::vector<std::complex<double>> out;
    Eigen::FFT<double> fft;
    fft.fwd(out, in);
    const double scale = dx_ / std::sqrt(2.0 * std::numbers::pi);
    Eigen::VectorXcd result(n_);
    for (int k = 0; k < n_; ++k) {
      const int kp = k - n_ / 2;
      const int idx = kp < 0 ? kp + n_ : kp;
      const double sign = (kp % 2 == 0) ? 1.0 : -1.0;
      result(k) = scale * sign * out[static_cast<std::size_t>(idx)];
    }
    return result;
  }

  Eigen::VectorXcd inverse(const Eigen::VectorXcd& psi_tilde) const {
    // Mirror of forward: undoing the index shift and sign on the input turns
    // the centred inverse into a plain IDFT, psi_j = n dp/sqrt(2 pi) IDFT[a]_j
    // with a_{k' mod n} = (-1)^{k'} psi~_k.
    std::vector<std::complex<double>> in(static_cast<std::size_t>(n_));
    for (int k = 0; k < n_; ++k) {
      const int kp = k - n_ / 2;
      const int idx = kp < 0 ? kp + n_ : kp;
      const double sign = (kp % 2 == 0) ? 1.0 : -1.0;
      in[static_cast<std::size_t>(idx)] = sign * psi_tilde(k);
    }
    std::vector<std::complex<double>> out;
    Eigen::FFT<double> fft;
    fft.inv(out, in);
    const double scale = n_ * dp_ / std::sqrt(2.0 * std::numbers::pi);
    Eigen::VectorXcd result(n_);
    for (int j = 0; j < n_; ++j) {
      result(j) = scale * out[static_cast<std::size_t>(j)];
    }
    return result;
  }

 private:
  int n_;
  double dx_;
  double dp_;
};

}  // namespace geophase::detail
