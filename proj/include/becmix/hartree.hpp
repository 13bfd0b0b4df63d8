#pragma once

// Coupled Hartree-type dynamics for a p-component mixture,
//
//   i du_q/dt = -Lap u_q + (V_qq * |u_q|^2) u_q
//               + sum_{r in S(q)} c_qr (V_qr * |u_r|^2) u_q,
//
// integrated by Strang-split spectral stepping (half kinetic phase,
// full potential phase from the pre-substep densities, half kinetic
// phase; every substep is norm-exact). S(q) = {r != q} by default;
// include_self_cross switches to the full sum over r.

#include <optional>
#include <vector>

#include "becmix/grid.hpp"
#include "becmix/potentials.hpp"

namespace becmix {

// Physical definition of a mixture experiment: particle numbers N_q,
// weights c_q = N_q/N, cross weights c_qr (default N_r/N), potentials.
struct MixtureSpec {
  int p = 0;
  std::vector<long> particle_numbers;
  Eigen::VectorXd c;
  Eigen::MatrixXd c_cross;
  PotentialMatrix potentials;
  bool include_self_cross = false;

  long total_particles() const;

  static MixtureSpec make(std::vector<long> particle_numbers, PotentialMatrix potentials,
                          std::optional<Eigen::MatrixXd> c_cross = std::nullopt,
                          bool include_self_cross = false);
  // Same physics with every N_q replaced (weights recomputed).
  MixtureSpec with_particle_numbers(std::vector<long> particle_numbers) const;
  MixtureSpec with_cross_perturbation(const Eigen::MatrixXd& delta) const;

  void validate() const;
};

struct OrbitalSet {
  GridPtr grid;
  std::vector<Eigen::VectorXcd> orbitals;  // one per component, site values
  double time = 0.0;

  double orbital_norm(int q) const;
};

struct HartreeDiagnostics {
  double time = 0.0;
  std::vector<double> masses;
  double weighted_energy = 0.0;
};

// Right-hand side du/dt = -i(...) of the coupled system; the returned
// OrbitalSet holds velocities, not states.
OrbitalSet hartree_rhs(const OrbitalSet& state, const MixtureSpec& spec);

OrbitalSet strang_step(const OrbitalSet& state, const MixtureSpec& spec, double dt);

double weighted_energy(const OrbitalSet& state, const MixtureSpec& spec);
HartreeDiagnostics diagnostics(const OrbitalSet& state, const MixtureSpec& spec);

struct HartreeTrajectory {
  std::vector<OrbitalSet> snapshots;
  std::vector<HartreeDiagnostics> diagnostics;
};

// Fixed-dt evolution with snapshots every `snapshot_stride` steps (the
// initial and final states are always included). Lands within dt of t_final.
HartreeTrajectory evolve(OrbitalSet state, const MixtureSpec& spec, double t_final, double dt,
                         int snapshot_stride = 1);

// Steps to exactly t_target using uniform steps of size <= dt_max.
OrbitalSet evolve_to(OrbitalSet state, const MixtureSpec& spec, double t_target, double dt_max);

struct PerturbationReport {
  std::vector<double> times;
  // times x p matrix of L2 differences ||u_q - u~_q||.
  Eigen::MatrixXd differences;
  // Envelope max_q diff_q(t) <= amplitude * exp(rate * t) for all samples.
  double envelope_amplitude = 0.0;
  double envelope_rate = 0.0;
};

// Co-evolves the given spec and the spec with c_cross + delta from the same
// initial data; reports per-component L2 differences over time.
PerturbationReport perturbation_study(const OrbitalSet& state, const MixtureSpec& spec,
                                      const Eigen::MatrixXd& delta, double t_final, double dt,
                                      int sample_stride = 1);

}  // namespace becmix
