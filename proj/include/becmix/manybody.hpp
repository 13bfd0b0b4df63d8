#pragma once

// Exact many-body Schrodinger dynamics for the mean-field mixture
// Hamiltonian on a small periodic grid, in the joint fixed-number
// occupation basis.
//
// Site modes carry the h-weighting a_x ~ a_m / sqrt(h), under which
//   H = sum_q [ sum_{mm'} T_{mm'} a+_m a_m'
//             + 1/(2 N_q) sum_{mm'} V_qq(x_m - x_m') a+_m a+_m' a_m' a_m ]
//     + sum_{q<r} 1/N sum_{mm'} V_qr(x_m - x_m') n^q_m n^r_m'
// with T the spectral one-body kinetic matrix and all interaction terms
// diagonal in the occupation basis.

#include <Eigen/Sparse>

#include "becmix/fock_basis.hpp"
#include "becmix/grid.hpp"
#include "becmix/hartree.hpp"

namespace becmix {

struct ManyBodyState {
  JointBasisPtr basis;
  Eigen::VectorXcd amplitudes;

  double norm() const { return amplitudes.norm(); }
};

struct ManyBodyHamiltonian {
  JointBasisPtr basis;
  Eigen::SparseMatrix<Complex, Eigen::RowMajor> matrix;
  std::vector<long> particle_numbers;
  long total_particles = 0;

  // Gershgorin upper bound on the spectral radius; deterministic and cheap.
  double norm_bound() const;
};

// Spectral one-body kinetic matrix (site-value action of -Laplacian),
// exactly Hermitized.
Eigen::MatrixXcd kinetic_matrix(const PeriodicGrid& grid);

ManyBodyHamiltonian build_hamiltonian(const GridPtr& grid, const MixtureSpec& spec,
                                      const JointBasisPtr& basis);

// Embeds the product state  prod_q u_q^{(x) N_q}  (normalized orbitals) into
// the joint occupation basis via multinomial amplitudes.
ManyBodyState product_state(const JointBasisPtr& basis, const OrbitalSet& orbitals);

// Approximates exp(-i H t) psi by adaptive Lanczos stepping. The result norm
// is preserved within 10*tol; deterministic for fixed inputs.
ManyBodyState krylov_propagate(const ManyBodyHamiltonian& hamiltonian, const ManyBodyState& psi,
                               double t, double tol, int krylov_dim = 30);

// <N^(q)> per component, computed honestly from the amplitudes (equals N_q
// exactly in a fixed-number basis; exists to assert the bookkeeping).
std::vector<double> number_expectations(const ManyBodyState& psi);

Complex energy_expectation(const ManyBodyHamiltonian& hamiltonian, const ManyBodyState& psi);

}  // namespace becmix
