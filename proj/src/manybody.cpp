#include "becmix/manybody.hpp"

#include <cmath>

namespace becmix {

double ManyBodyHamiltonian::norm_bound() const {
  double bound = 0.0;
  for (int row = 0; row < matrix.outerSize(); ++row) {
    double sum = 0.0;
    for (Eigen::SparseMatrix<Complex, Eigen::RowMajor>::InnerIterator it(matrix, row); it; ++it)
      sum += std::abs(it.value());
    bound = std::max(bound, sum);
  }
  return bound;
}

Eigen::MatrixXcd kinetic_matrix(const PeriodicGrid& grid) {
  const std::size_t n = grid.site_count();
  Eigen::MatrixXcd t(n, n);
  Field unit(std::shared_ptr<const PeriodicGrid>(), {});
  // Build column-by-column from the spectral Laplacian action.
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
  for (std::size_t j = 0; j < n; ++j) {
    e.setZero();
    e[static_cast<Eigen::Index>(j)] = 1.0;
    Eigen::VectorXcd modes = grid.raw_forward(e);
    modes.array() *= grid.k_squared().array();
    t.col(static_cast<Eigen::Index>(j)) =
        grid.raw_inverse(modes) / static_cast<double>(n);
  }
  return 0.5 * (t + t.adjoint()).eval();
}

namespace {

// V(x_m - x_m') looked up from the sampled displacement table.
class PairPotentialTable {
 public:
  PairPotentialTable(const PotentialSpec& spec, const GridPtr& grid)
      : grid_(grid.get()), table_(sample(spec, grid).values) {}

  double operator()(std::size_t m, std::size_t mp) const {
    int a[3], b[3], d[3];
    grid_->unflatten(m, a);
    grid_->unflatten(mp, b);
    for (int i = 0; i < 3; ++i) d[i] = a[i] - b[i];
    return table_[static_cast<Eigen::Index>(grid_->flatten(d))];
  }

 private:
  const PeriodicGrid* grid_;
  Eigen::VectorXd table_;
};

}  // namespace

ManyBodyHamiltonian build_hamiltonian(const GridPtr& grid, const MixtureSpec& spec,
                                      const JointBasisPtr& basis) {
  spec.validate();
  const int p = spec.p;
  if (basis->components() != p)
    throw std::invalid_argument("build_hamiltonian: component count mismatch");
  if (basis->modes() != static_cast<int>(grid->site_count()))
    throw std::invalid_argument("build_hamiltonian: mode count does not match grid");
  for (int q = 0; q < p; ++q)
    if (basis->particle_numbers()[q] != spec.particle_numbers[q])
      throw std::invalid_argument("build_hamiltonian: particle numbers mismatch");

  const std::size_t modes = grid->site_count();
  const std::size_t dim = basis->dimension();
  const double n_total = static_cast<double>(spec.total_particles());

  const Eigen::MatrixXcd kinetic = kinetic_matrix(*grid);

  std::vector<PairPotentialTable> intra;
  intra.reserve(p);
  for (int q = 0; q < p; ++q) intra.emplace_back(spec.potentials(q, q), grid);
  std::vector<std::vector<PairPotentialTable>> inter(p);
  for (int q = 0; q < p; ++q)
    for (int r = q + 1; r < p; ++r) inter[q].emplace_back(spec.potentials(q, r), grid);

  std::vector<Eigen::Triplet<Complex>> triplets;

  std::vector<std::size_t> comp_idx(p), hop_idx(p);
  std::vector<std::span<const int>> occ(p);

  for (std::size_t row = 0; row < dim; ++row) {
    basis->decompose(row, comp_idx);
    for (int q = 0; q < p; ++q) occ[q] = basis->component(q).state(comp_idx[q]);

    // Diagonal: kinetic m=m' part, intra- and inter-component interactions.
    double diag = 0.0;
    for (int q = 0; q < p; ++q) {
      const double inv_nq = 1.0 / static_cast<double>(spec.particle_numbers[q]);
      double pair_sum = 0.0;
      long nq_check = 0;
      for (std::size_t m = 0; m < modes; ++m) {
        const int nm = occ[q][m];
        if (nm == 0) continue;
        nq_check += nm;
        diag += std::real(kinetic(m, m)) * nm;
        for (std::size_t mp = 0; mp < modes; ++mp) {
          const int nmp = occ[q][mp];
          if (nmp == 0) continue;
          // a+_m a+_m' a_m' a_m = n_m n_m' - delta_mm' n_m
          pair_sum += intra[q](m, mp) * (static_cast<double>(nm) * nmp - (m == mp ? nm : 0));
        }
      }
      diag += 0.5 * inv_nq * pair_sum;
      (void)nq_check;
      for (int r = q + 1; r < p; ++r) {
        const PairPotentialTable& v = inter[q][static_cast<std::size_t>(r - q - 1)];
        double cross = 0.0;
        for (std::size_t m = 0; m < modes; ++m) {
          const int nm = occ[q][m];
          if (nm == 0) continue;
          for (std::size_t mp = 0; mp < modes; ++mp) {
            const int nmp = occ[r][mp];
            if (nmp == 0) continue;
            cross += v(m, mp) * static_cast<double>(nm) * nmp;
          }
        }
        diag += cross / n_total;
      }
    }
    triplets.emplace_back(static_cast<int>(row), static_cast<int>(row), Complex(diag, 0.0));

    // Off-diagonal kinetic hops, upper triangle only; mirrored explicitly so
    // the assembled matrix is Hermitian by construction.
    std::vector<int> hopped(occ[0].size());
    for (int q = 0; q < p; ++q) {
      const FockBasis& fock = basis->component(q);
      hopped.assign(occ[q].begin(), occ[q].end());
      for (std::size_t mp = 0; mp < modes; ++mp) {
        const int nmp = occ[q][mp];
        if (nmp == 0) continue;
        for (std::size_t m = 0; m < modes; ++m) {
          if (m == mp) continue;
          // a+_m a_m' : amplitude sqrt(n_m') * sqrt(n_m + 1)
          hopped[mp] -= 1;
          hopped[m] += 1;
          const std::size_t target = fock.index_of(hopped);
          hop_idx = comp_idx;
          hop_idx[q] = target;
          const std::size_t col = basis->joint_index(hop_idx);
          if (col > row) {
            const double amp =
                std::sqrt(static_cast<double>(nmp)) * std::sqrt(static_cast<double>(occ[q][m] + 1));
            const Complex value = kinetic(m, mp) * amp;
            triplets.emplace_back(static_cast<int>(row), static_cast<int>(col), value);
            triplets.emplace_back(static_cast<int>(col), static_cast<int>(row), std::conj(value));
          }
          hopped[mp] += 1;
          hopped[m] -= 1;
        }
      }
    }
  }

  ManyBodyHamiltonian h;
  h.basis = basis;
  h.particle_numbers = spec.particle_numbers;
  h.total_particles = spec.total_particles();
  h.matrix.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  h.matrix.setFromTriplets(triplets.begin(), triplets.end());
  h.matrix.makeCompressed();
  return h;
}

ManyBodyState product_state(const JointBasisPtr& basis, const OrbitalSet& orbitals) {
  const int p = basis->components();
  if (static_cast<int>(orbitals.orbitals.size()) != p)
    throw std::invalid_argument("product_state: orbital count mismatch");
  const double sqrt_h = std::sqrt(orbitals.grid->cell_volume());

  // Per-component amplitude vectors: A(n) = sqrt(N!/prod n_i!) prod c_i^n_i
  // with c_i = sqrt(h) u(x_i).
  std::vector<Eigen::VectorXcd> comp_amp;
  comp_amp.reserve(p);
  for (int q = 0; q < p; ++q) {
    const FockBasis& fock = basis->component(q);
    if (fock.modes() != static_cast<int>(orbitals.grid->site_count()))
      throw std::invalid_argument("product_state: orbital grid does not match basis modes");
    const Eigen::VectorXcd coeff = sqrt_h * orbitals.orbitals[q];
    const long n = fock.particles();
    const double log_n_fact = std::lgamma(static_cast<double>(n) + 1.0);

    Eigen::VectorXcd amp(fock.size());
    for (std::size_t i = 0; i < fock.size(); ++i) {
      const auto occ = fock.state(i);
      double log_multinomial = log_n_fact;
      Complex monomial = 1.0;
      for (int m = 0; m < fock.modes(); ++m) {
        const int nm = occ[static_cast<std::size_t>(m)];
        if (nm == 0) continue;
        log_multinomial -= std::lgamma(static_cast<double>(nm) + 1.0);
        monomial *= std::pow(coeff[m], nm);
      }
      amp[static_cast<Eigen::Index>(i)] = std::exp(0.5 * log_multinomial) * monomial;
    }
    comp_amp.push_back(std::move(amp));
  }

  // Kronecker product, component 0 slowest (row-major joint ordering).
  Eigen::VectorXcd joint = comp_amp[0];
  for (int q = 1; q < p; ++q) {
    Eigen::VectorXcd next(joint.size() * comp_amp[q].size());
    Eigen::Index pos = 0;
    for (Eigen::Index i = 0; i < joint.size(); ++i)
      for (Eigen::Index j = 0; j < comp_amp[q].size(); ++j)
        next[pos++] = joint[i] * comp_amp[q][j];
    joint = std::move(next);
  }

  ManyBodyState state{basis, std::move(joint)};
  if (std::abs(state.norm() - 1.0) > 1e-9)
    throw NumericalError("product_state: construction lost normalization");
  return state;
}

namespace {

// One Lanczos step of size tau; returns the propagated vector and a local
// error estimate (classical corner-entry heuristic).
struct LanczosResult {
  Eigen::VectorXcd vector;
  double error_estimate;
};

LanczosResult lanczos_step(const Eigen::SparseMatrix<Complex, Eigen::RowMajor>& h,
                           const Eigen::VectorXcd& psi, double tau, int m) {
  const Eigen::Index dim = psi.size();
  const int m_max = static_cast<int>(std::min<Eigen::Index>(m, dim));

  Eigen::MatrixXcd basis(dim, m_max + 1);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m_max);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(m_max + 1);

  const double norm0 = psi.norm();
  basis.col(0) = psi / norm0;

  int built = 0;
  double next_beta = 0.0;
  for (int j = 0; j < m_max; ++j) {
    Eigen::VectorXcd w = h * basis.col(j);
    if (j > 0) w -= beta[j] * basis.col(j - 1);
    alpha[j] = std::real(basis.col(j).dot(w));
    w -= alpha[j] * basis.col(j);
    // One full reorthogonalization pass keeps the basis numerically
    // orthonormal, which is what preserves the propagated norm.
    for (int i = 0; i <= j; ++i) w -= basis.col(i).dot(w) * basis.col(i);
    next_beta = w.norm();
    built = j + 1;
    if (next_beta < 1e-14) break;  // happy breakdown: subspace is invariant
    beta[j + 1] = next_beta;
    if (j + 1 < m_max + 1) basis.col(j + 1) = w / next_beta;
  }

  Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(built, built);
  for (int j = 0; j < built; ++j) {
    tri(j, j) = alpha[j];
    if (j + 1 < built) {
      tri(j, j + 1) = beta[j + 1];
      tri(j + 1, j) = beta[j + 1];
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(tri);
  const Eigen::VectorXcd phases =
      (Complex(0.0, -tau) * eig.eigenvalues().array().cast<Complex>()).exp().matrix();
  const Eigen::VectorXcd small =
      eig.eigenvectors().cast<Complex>() *
      phases.cwiseProduct(eig.eigenvectors().row(0).transpose().cast<Complex>());

  LanczosResult result;
  result.vector = norm0 * (basis.leftCols(built) * small);
  result.error_estimate =
      (built < m_max || next_beta < 1e-14) ? 0.0 : next_beta * std::abs(small[built - 1]) * norm0;
  return result;
}

}  // namespace

ManyBodyState krylov_propagate(const ManyBodyHamiltonian& hamiltonian, const ManyBodyState& psi,
                               double t, double tol, int krylov_dim) {
  if (!(tol > 0.0)) throw std::invalid_argument("krylov_propagate: tol must be positive");
  if (psi.basis != hamiltonian.basis &&
      psi.amplitudes.size() != hamiltonian.matrix.rows())
    throw std::invalid_argument("krylov_propagate: state/hamiltonian mismatch");
  if (t == 0.0) return psi;

  const double norm_bound = hamiltonian.norm_bound();
  // Start near tau*||H|| ~ krylov_dim/3 and refine against the local error
  // estimate; each refinement doubles the substep count.
  long substeps = std::max<long>(
      1, static_cast<long>(std::ceil(std::abs(t) * norm_bound / (krylov_dim / 3.0 + 1.0))));

  constexpr long kMaxSubsteps = 1 << 22;
  while (true) {
    if (substeps > kMaxSubsteps)
      throw NumericalError("krylov_propagate: failed to reach tolerance");
    const double tau = t / static_cast<double>(substeps);
    const double step_tol = tol / static_cast<double>(substeps);

    Eigen::VectorXcd current = psi.amplitudes;
    bool ok = true;
    for (long s = 0; s < substeps; ++s) {
      LanczosResult step = lanczos_step(hamiltonian.matrix, current, tau, krylov_dim);
      if (step.error_estimate > step_tol) {
        ok = false;
        break;
      }
      current = std::move(step.vector);
    }
    if (ok) return {psi.basis, std::move(current)};
    substeps *= 2;
  }
}

std::vector<double> number_expectations(const ManyBodyState& psi) {
  const JointBasis& basis = *psi.basis;
  const int p = basis.components();
  std::vector<double> expect(static_cast<std::size_t>(p), 0.0);
  std::vector<std::size_t> comp_idx(static_cast<std::size_t>(p));
  for (std::size_t j = 0; j < basis.dimension(); ++j) {
    const double w = std::norm(psi.amplitudes[static_cast<Eigen::Index>(j)]);
    if (w == 0.0) continue;
    basis.decompose(j, comp_idx);
    for (int q = 0; q < p; ++q) {
      long n = 0;
      for (int v : basis.component(q).state(comp_idx[static_cast<std::size_t>(q)])) n += v;
      expect[static_cast<std::size_t>(q)] += w * static_cast<double>(n);
    }
  }
  return expect;
}

Complex energy_expectation(const ManyBodyHamiltonian& hamiltonian, const ManyBodyState& psi) {
  return psi.amplitudes.dot(hamiltonian.matrix * psi.amplitudes);
}

}  // namespace becmix
