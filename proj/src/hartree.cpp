#include "becmix/hartree.hpp"

#include <cmath>

namespace becmix {

long MixtureSpec::total_particles() const {
  long total = 0;
  for (long n : particle_numbers) total += n;
  return total;
}

MixtureSpec MixtureSpec::make(std::vector<long> particle_numbers, PotentialMatrix potentials,
                              std::optional<Eigen::MatrixXd> c_cross, bool include_self_cross) {
  MixtureSpec spec;
  spec.p = static_cast<int>(particle_numbers.size());
  spec.particle_numbers = std::move(particle_numbers);
  spec.potentials = std::move(potentials);
  spec.include_self_cross = include_self_cross;

  const double total = static_cast<double>(spec.total_particles());
  spec.c.resize(spec.p);
  for (int q = 0; q < spec.p; ++q)
    spec.c[q] = static_cast<double>(spec.particle_numbers[q]) / total;

  if (c_cross.has_value()) {
    spec.c_cross = std::move(*c_cross);
  } else {
    spec.c_cross.resize(spec.p, spec.p);
    for (int q = 0; q < spec.p; ++q) spec.c_cross.row(q) = spec.c.transpose();
  }

  spec.validate();
  return spec;
}

MixtureSpec MixtureSpec::with_particle_numbers(std::vector<long> particle_numbers) const {
  return make(std::move(particle_numbers), potentials, std::nullopt, include_self_cross);
}

MixtureSpec MixtureSpec::with_cross_perturbation(const Eigen::MatrixXd& delta) const {
  if (delta.rows() != p || delta.cols() != p)
    throw std::invalid_argument("cross perturbation: delta must be p x p");
  MixtureSpec spec = *this;
  spec.c_cross += delta;
  spec.validate();
  return spec;
}

void MixtureSpec::validate() const {
  if (p < 1) throw std::invalid_argument("MixtureSpec: need at least one component");
  if (static_cast<int>(particle_numbers.size()) != p)
    throw std::invalid_argument("MixtureSpec: particle number count mismatch");
  for (long n : particle_numbers)
    if (n < 1) throw std::invalid_argument("MixtureSpec: every N_q must be >= 1");
  if (c.size() != p || c_cross.rows() != p || c_cross.cols() != p)
    throw std::invalid_argument("MixtureSpec: weight dimensions mismatch");
  if (std::abs(c.sum() - 1.0) > 1e-12)
    throw std::invalid_argument("MixtureSpec: weights c_q must sum to 1");
  for (int q = 0; q < p; ++q)
    if (!(c[q] > 0.0)) throw std::invalid_argument("MixtureSpec: weights c_q must be positive");
  if (potentials.components() != p)
    throw std::invalid_argument("MixtureSpec: potential matrix size mismatch");
}

double OrbitalSet::orbital_norm(int q) const {
  return std::sqrt(grid->cell_volume()) * orbitals.at(q).norm();
}

namespace {

void check_state(const OrbitalSet& state, const MixtureSpec& spec) {
  if (static_cast<int>(state.orbitals.size()) != spec.p)
    throw std::invalid_argument("orbital count does not match mixture spec");
}

// Sampled potentials for one spec on one grid, cached per evolve call.
struct SampledPotentials {
  std::vector<RealField> entries;  // row-major p x p
  int p;

  SampledPotentials(const MixtureSpec& spec, const GridPtr& grid) : p(spec.p) {
    entries.reserve(static_cast<std::size_t>(p) * p);
    for (int q = 0; q < p; ++q)
      for (int r = 0; r < p; ++r) entries.push_back(sample(spec.potentials(q, r), grid));
  }
  const RealField& operator()(int q, int r) const {
    return entries[static_cast<std::size_t>(q) * p + r];
  }
};

std::vector<RealField> densities(const OrbitalSet& state) {
  std::vector<RealField> rho;
  rho.reserve(state.orbitals.size());
  for (const auto& u : state.orbitals)
    rho.emplace_back(state.grid, u.cwiseAbs2());
  return rho;
}

// Effective potential W_q built from the given densities.
Eigen::VectorXd effective_potential(int q, const std::vector<RealField>& rho,
                                    const SampledPotentials& pots, const MixtureSpec& spec) {
  Eigen::VectorXd w = convolve_periodic(pots(q, q), rho[q]).values;
  for (int r = 0; r < spec.p; ++r) {
    if (r == q && !spec.include_self_cross) continue;
    w += spec.c_cross(q, r) * convolve_periodic(pots(q, r), rho[r]).values;
  }
  return w;
}

void kinetic_half_step(OrbitalSet& state, double dt) {
  const auto& grid = *state.grid;
  const Eigen::ArrayXd phase = -0.5 * dt * grid.k_squared().array();
  const Eigen::VectorXcd multiplier =
      (Complex(0.0, 1.0) * phase).exp().matrix();
  for (auto& u : state.orbitals) {
    Eigen::VectorXcd modes = grid.raw_forward(u);
    modes.array() *= multiplier.array();
    u = grid.raw_inverse(modes) / static_cast<double>(grid.site_count());
  }
}

void abort_if_not_finite(const OrbitalSet& state) {
  for (std::size_t q = 0; q < state.orbitals.size(); ++q)
    if (!state.orbitals[q].allFinite())
      throw NumericalError("hartree: non-finite orbital for component " + std::to_string(q) +
                           " at t=" + std::to_string(state.time));
}

OrbitalSet strang_step_cached(OrbitalSet state, const SampledPotentials& pots,
                              const MixtureSpec& spec, double dt) {
  kinetic_half_step(state, dt);

  const auto rho = densities(state);
  for (int q = 0; q < spec.p; ++q) {
    const Eigen::VectorXd w = effective_potential(q, rho, pots, spec);
    state.orbitals[q].array() *= (Complex(0.0, -1.0) * dt * w.array()).exp();
  }

  kinetic_half_step(state, dt);
  state.time += dt;
  abort_if_not_finite(state);
  return state;
}

}  // namespace

OrbitalSet hartree_rhs(const OrbitalSet& state, const MixtureSpec& spec) {
  check_state(state, spec);
  const SampledPotentials pots(spec, state.grid);
  const auto rho = densities(state);

  OrbitalSet velocity{state.grid, {}, state.time};
  velocity.orbitals.reserve(spec.p);
  for (int q = 0; q < spec.p; ++q) {
    const Eigen::VectorXcd kinetic =
        laplacian_apply(Field{state.grid, state.orbitals[q]}).values;
    const Eigen::VectorXd w = effective_potential(q, rho, pots, spec);
    Eigen::VectorXcd v = kinetic;
    v.array() += w.array() * state.orbitals[q].array();
    velocity.orbitals.push_back(Complex(0.0, -1.0) * v);
  }
  return velocity;
}

OrbitalSet strang_step(const OrbitalSet& state, const MixtureSpec& spec, double dt) {
  check_state(state, spec);
  if (!(dt > 0.0)) throw std::invalid_argument("strang_step: dt must be positive");
  return strang_step_cached(state, SampledPotentials(spec, state.grid), spec, dt);
}

double weighted_energy(const OrbitalSet& state, const MixtureSpec& spec) {
  check_state(state, spec);
  const SampledPotentials pots(spec, state.grid);
  const auto rho = densities(state);
  const double h = state.grid->cell_volume();

  double energy = 0.0;
  for (int q = 0; q < spec.p; ++q) {
    const Field uq{state.grid, state.orbitals[q]};
    energy += spec.c[q] * std::real(inner_product(uq, laplacian_apply(uq)));
    energy += 0.5 * spec.c[q] * h *
              rho[q].values.dot(convolve_periodic(pots(q, q), rho[q]).values);
    for (int r = 0; r < spec.p; ++r) {
      if (r == q) continue;
      energy += 0.5 * spec.c[q] * spec.c[r] * h *
                rho[q].values.dot(convolve_periodic(pots(q, r), rho[r]).values);
    }
  }
  return energy;
}

HartreeDiagnostics diagnostics(const OrbitalSet& state, const MixtureSpec& spec) {
  HartreeDiagnostics d;
  d.time = state.time;
  d.masses.reserve(spec.p);
  for (int q = 0; q < spec.p; ++q) d.masses.push_back(state.orbital_norm(q));
  d.weighted_energy = weighted_energy(state, spec);
  return d;
}

HartreeTrajectory evolve(OrbitalSet state, const MixtureSpec& spec, double t_final, double dt,
                         int snapshot_stride) {
  check_state(state, spec);
  if (t_final < 0.0) throw std::invalid_argument("evolve: t_final must be nonnegative");
  if (!(dt > 0.0)) throw std::invalid_argument("evolve: dt must be positive");
  if (snapshot_stride < 1) throw std::invalid_argument("evolve: stride must be >= 1");

  const SampledPotentials pots(spec, state.grid);
  const long steps = std::lround(t_final / dt);

  HartreeTrajectory traj;
  traj.snapshots.push_back(state);
  traj.diagnostics.push_back(diagnostics(state, spec));
  for (long s = 1; s <= steps; ++s) {
    state = strang_step_cached(std::move(state), pots, spec, dt);
    if (s % snapshot_stride == 0 || s == steps) {
      traj.snapshots.push_back(state);
      traj.diagnostics.push_back(diagnostics(state, spec));
    }
  }
  return traj;
}

OrbitalSet evolve_to(OrbitalSet state, const MixtureSpec& spec, double t_target, double dt_max) {
  check_state(state, spec);
  if (!(dt_max > 0.0)) throw std::invalid_argument("evolve_to: dt_max must be positive");
  const double span = t_target - state.time;
  if (span < -1e-12) throw std::invalid_argument("evolve_to: target lies in the past");
  if (span <= 0.0) return state;

  const SampledPotentials pots(spec, state.grid);
  const long steps = std::max<long>(1, static_cast<long>(std::ceil(span / dt_max - 1e-12)));
  const double dt = span / static_cast<double>(steps);
  for (long s = 0; s < steps; ++s)
    state = strang_step_cached(std::move(state), pots, spec, dt);
  state.time = t_target;  // kill accumulated roundoff in the time stamp
  return state;
}

PerturbationReport perturbation_study(const OrbitalSet& state, const MixtureSpec& spec,
                                      const Eigen::MatrixXd& delta, double t_final, double dt,
                                      int sample_stride) {
  check_state(state, spec);
  const MixtureSpec perturbed = spec.with_cross_perturbation(delta);
  const SampledPotentials pots(spec, state.grid);

  const long steps = std::lround(t_final / dt);
  const double h = state.grid->cell_volume();

  OrbitalSet a = state;
  OrbitalSet b = state;

  PerturbationReport report;
  std::vector<Eigen::VectorXd> rows;
  auto record = [&]() {
    Eigen::VectorXd diff(spec.p);
    for (int q = 0; q < spec.p; ++q)
      diff[q] = std::sqrt(h) * (a.orbitals[q] - b.orbitals[q]).norm();
    report.times.push_back(a.time);
    rows.push_back(diff);
  };

  record();
  for (long s = 1; s <= steps; ++s) {
    a = strang_step_cached(std::move(a), pots, spec, dt);
    b = strang_step_cached(std::move(b), pots, perturbed, dt);
    if (s % sample_stride == 0 || s == steps) record();
  }

  report.differences.resize(static_cast<Eigen::Index>(rows.size()), spec.p);
  for (std::size_t i = 0; i < rows.size(); ++i)
    report.differences.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();

  // Exponential envelope A*exp(B*t): least-squares slope of log(max_q diff)
  // over the strictly positive samples, then A lifted so the bound covers
  // every sample.
  std::vector<double> ts, logs;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double d = rows[i].maxCoeff();
    if (d > 0.0) {
      ts.push_back(report.times[i]);
      logs.push_back(std::log(d));
    }
  }
  if (ts.size() >= 2) {
    const double n = static_cast<double>(ts.size());
    double st = 0, sl = 0, stt = 0, stl = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      st += ts[i];
      sl += logs[i];
      stt += ts[i] * ts[i];
      stl += ts[i] * logs[i];
    }
    const double denom = n * stt - st * st;
    double rate = (denom > 0.0) ? (n * stl - st * sl) / denom : 0.0;
    rate = std::max(rate, 0.0);
    double log_amp = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ts.size(); ++i)
      log_amp = std::max(log_amp, logs[i] - rate * ts[i]);
    report.envelope_rate = rate;
    report.envelope_amplitude = std::exp(log_amp);
  }
  return report;
}

}  // namespace becmix
