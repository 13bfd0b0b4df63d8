#pragma once

// Interaction-potential family V_qr: evaluation on periodic grids with the
// minimum-image convention, and numerical certification of the operator
// inequality V^2 <= K(1 - Laplacian).
//
// Per-kind formulas (x = minimum-image displacement, lambda = amplitude,
// mu = range decay rate, gamma = exponent, eps = softening):
//   zero               V(x) = 0
//   gaussian           V(x) = lambda * exp(-mu |x|^2)
//   soft_coulomb       V(x) = lambda / sqrt(|x|^2 + eps^2)
//   yukawa_regularized V(x) = lambda * exp(-mu |x|) / (|x|^2 + eps^2)^(gamma/2)
//   grid_sampled       user-provided samples, symmetrized

#include <string>
#include <vector>

#include "becmix/grid.hpp"

namespace becmix {

enum class PotentialKind { zero, gaussian, soft_coulomb, yukawa_regularized, grid_sampled };

std::string to_string(PotentialKind kind);
PotentialKind potential_kind_from_string(const std::string& name);

struct PotentialSpec {
  PotentialKind kind = PotentialKind::zero;
  double amplitude = 0.0;
  double range = 0.0;        // mu >= 0
  double exponent = 1.0;     // gamma in (0, 3/2), yukawa only
  double softening = 1.0;    // eps > 0
  std::vector<double> samples;  // grid_sampled only, length = site count

  void validate() const;  // throws std::invalid_argument
  bool operator==(const PotentialSpec&) const = default;

  static PotentialSpec zero_potential() { return {}; }
  static PotentialSpec gaussian(double lambda, double mu);
  static PotentialSpec soft_coulomb(double lambda, double eps);
  static PotentialSpec yukawa(double lambda, double mu, double gamma, double eps);
  static PotentialSpec grid_sampled(std::vector<double> samples);
};

// Symmetric p x p matrix of potential specs.
class PotentialMatrix {
 public:
  PotentialMatrix() = default;
  // entries in row-major order, length p*p; must be symmetric.
  static PotentialMatrix make(int p, std::vector<PotentialSpec> entries);
  static PotentialMatrix uniform(int p, const PotentialSpec& spec);

  int components() const { return p_; }
  const PotentialSpec& operator()(int q, int r) const;
  bool all_zero() const;

 private:
  int p_ = 0;
  std::vector<PotentialSpec> entries_;
};

// Evaluates the potential at signed periodic displacements and symmetrizes,
// so values[m] == values[(M-m) mod M] holds exactly per axis.
RealField sample(const PotentialSpec& spec, const GridPtr& grid);

struct CertResult {
  double K = 0.0;
  double min_eig = 0.0;
  bool holds = false;
};

// Assembles the dense matrix K(1 + (-Laplacian)) - V^2 and reports its
// minimum eigenvalue; holds iff min_eig >= -1e-10. Dense eigensolve is
// capped at site_count <= 4096.
CertResult certify_operator_inequality(const PotentialSpec& spec, const GridPtr& grid, double K);

// Smallest K certifying the inequality, located by doubling + bisection
// to the given relative tolerance.
double find_min_certified_K(const PotentialSpec& spec, const GridPtr& grid,
                            double rel_tol = 1e-6);

}  // namespace becmix
