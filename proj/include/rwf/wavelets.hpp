#pragma once

// Mother wavelets, scaled-translated atoms and the localization constants
// that enter every concentration bound.

#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rwf {

enum class WaveletFamily { MexicanHat, Morlet, Haar };

std::string_view family_name(WaveletFamily family);
// Accepts "mexican_hat", "morlet" and "haar"; throws ArgumentError otherwise.
WaveletFamily parse_family(std::string_view name);

// A real mother wavelet psi : R^d -> R with zero mean and unit L2 norm.
//
//   MexicanHat  C_d (d - |u|^2) exp(-|u|^2 / 2)
//   Morlet      C_d exp(-|u|^2 / 2) (cos(w0 . u) - exp(-|w0|^2 / 2))
//   Haar        +1 on [0, 1/2), -1 on [1/2, 1), 0 elsewhere (d = 1 only)
//
// The Mexican hat uses the negative Laplacian of the Gaussian so the mean is
// zero in every dimension; for d = 1 it coincides with C (1 - u^2) e^{-u^2/2}.
class MotherWavelet {
 public:
  static MotherWavelet mexican_hat(int dim);
  // Default centre frequency is 5 along the first coordinate.
  static MotherWavelet morlet(int dim, std::vector<double> omega0 = {});
  static MotherWavelet haar(int dim = 1);
  static MotherWavelet make(WaveletFamily family, int dim);

  WaveletFamily family() const { return family_; }
  int dim() const { return dim_; }
  const std::vector<double>& omega0() const { return omega0_; }
  // The constant C_d giving unit L2 norm.
  double normalization() const { return norm_; }
  int vanishing_moments() const;
  bool differentiable() const { return family_ != WaveletFamily::Haar; }
  bool compact() const { return family_ == WaveletFamily::Haar; }
  double sup_norm() const { return sup_; }
  double grad_sup_norm() const { return grad_sup_; }
  double radius() const { return radius_; }

  // Unchecked evaluation; u.size() must equal dim().
  double value(const double* u) const;
  // Gradient written to grad[0..dim).
  void gradient(const double* u, double* grad) const;

 private:
  MotherWavelet(WaveletFamily family, int dim, std::vector<double> omega0);

  WaveletFamily family_;
  int dim_;
  std::vector<double> omega0_;
  double omega_norm_ = 0.0;
  double kappa_ = 0.0;  // Morlet admissibility correction exp(-|w0|^2/2)
  double norm_ = 1.0;
  // Localization constants, fixed at construction.
  double sup_ = 0.0;
  double grad_sup_ = 0.0;
  double radius_ = 0.0;
};

double eval_mother(const MotherWavelet& w, std::span<const double> u);

// s^{-d/2} psi((x - t) / s).
double eval_atom(const MotherWavelet& w, double s, std::span<const double> t,
                 std::span<const double> x);

// Gradient of eval_atom with respect to x: s^{-d/2-1} grad psi((x - t) / s).
std::vector<double> atom_gradient(const MotherWavelet& w, double s, std::span<const double> t,
                                  std::span<const double> x);

struct TheoryConstants {
  double sup_norm = 0.0;        // M_psi
  double grad_sup_norm = 0.0;   // G_psi (+inf for Haar)
  double radius = 0.0;          // R_psi, support or effective radius
  int vanishing_moments = 0;    // M
  double feature_bound = 0.0;   // B = M_psi s_min^{-d/2}
  double atom_lipschitz = 0.0;  // L_psi = G_psi s_min^{-d/2-1}
  double map_lipschitz = 0.0;   // L_z <= L_psi
};

TheoryConstants constants(const MotherWavelet& w, double s_min);

// Radius beyond which |psi| < 1e-8 sup|psi| (exact support radius for Haar,
// measured from the support midpoint).
double effective_radius(const MotherWavelet& w);

// Interval of shifts t (one coordinate) for which the atom of scale s can be
// non-negligible at coordinate x.
std::pair<double, double> shift_support(const MotherWavelet& w, double s, double x);

// int u^k psi(u) du for d = 1.
double moment_integral(const MotherWavelet& w, int k);

}  // namespace rwf
