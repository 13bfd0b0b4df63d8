#include "becmix/potentials.hpp"

#include <cmath>

namespace becmix {

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::zero: return "zero";
    case PotentialKind::gaussian: return "gaussian";
    case PotentialKind::soft_coulomb: return "soft_coulomb";
    case PotentialKind::yukawa_regularized: return "yukawa_regularized";
    case PotentialKind::grid_sampled: return "grid_sampled";
  }
  return "unknown";
}

PotentialKind potential_kind_from_string(const std::string& name) {
  if (name == "zero") return PotentialKind::zero;
  if (name == "gaussian") return PotentialKind::gaussian;
  if (name == "soft_coulomb") return PotentialKind::soft_coulomb;
  if (name == "yukawa_regularized") return PotentialKind::yukawa_regularized;
  if (name == "grid_sampled") return PotentialKind::grid_sampled;
  throw std::invalid_argument("unknown potential kind: " + name);
}

void PotentialSpec::validate() const {
  if (range < 0.0) throw std::invalid_argument("potential: range must be nonnegative");
  switch (kind) {
    case PotentialKind::zero:
    case PotentialKind::gaussian:
      break;
    case PotentialKind::soft_coulomb:
      if (!(softening > 0.0))
        throw std::invalid_argument("soft_coulomb: softening must be positive");
      break;
    case PotentialKind::yukawa_regularized:
      if (!(softening > 0.0))
        throw std::invalid_argument("yukawa_regularized: softening must be positive");
      if (!(exponent > 0.0 && exponent < 1.5))
        throw std::invalid_argument("yukawa_regularized: exponent must lie in (0, 3/2)");
      break;
    case PotentialKind::grid_sampled:
      if (samples.empty())
        throw std::invalid_argument("grid_sampled: samples are required");
      break;
  }
}

PotentialSpec PotentialSpec::gaussian(double lambda, double mu) {
  PotentialSpec s;
  s.kind = PotentialKind::gaussian;
  s.amplitude = lambda;
  s.range = mu;
  return s;
}

PotentialSpec PotentialSpec::soft_coulomb(double lambda, double eps) {
  PotentialSpec s;
  s.kind = PotentialKind::soft_coulomb;
  s.amplitude = lambda;
  s.softening = eps;
  return s;
}

PotentialSpec PotentialSpec::yukawa(double lambda, double mu, double gamma, double eps) {
  PotentialSpec s;
  s.kind = PotentialKind::yukawa_regularized;
  s.amplitude = lambda;
  s.range = mu;
  s.exponent = gamma;
  s.softening = eps;
  return s;
}

PotentialSpec PotentialSpec::grid_sampled(std::vector<double> samples) {
  PotentialSpec s;
  s.kind = PotentialKind::grid_sampled;
  s.samples = std::move(samples);
  return s;
}

PotentialMatrix PotentialMatrix::make(int p, std::vector<PotentialSpec> entries) {
  if (p < 1) throw std::invalid_argument("PotentialMatrix: p must be >= 1");
  if (entries.size() != static_cast<std::size_t>(p) * p)
    throw std::invalid_argument("PotentialMatrix: need p*p entries");
  for (const auto& e : entries) e.validate();
  for (int q = 0; q < p; ++q)
    for (int r = q + 1; r < p; ++r)
      if (!(entries[q * p + r] == entries[r * p + q]))
        throw std::invalid_argument("PotentialMatrix: entries must be symmetric");
  PotentialMatrix m;
  m.p_ = p;
  m.entries_ = std::move(entries);
  return m;
}

PotentialMatrix PotentialMatrix::uniform(int p, const PotentialSpec& spec) {
  return make(p, std::vector<PotentialSpec>(static_cast<std::size_t>(p) * p, spec));
}

const PotentialSpec& PotentialMatrix::operator()(int q, int r) const {
  if (q < 0 || q >= p_ || r < 0 || r >= p_)
    throw std::out_of_range("PotentialMatrix: index out of range");
  return entries_[static_cast<std::size_t>(q) * p_ + r];
}

bool PotentialMatrix::all_zero() const {
  for (const auto& e : entries_)
    if (e.kind != PotentialKind::zero) return false;
  return true;
}

namespace {

double evaluate_radial(const PotentialSpec& spec, double r) {
  switch (spec.kind) {
    case PotentialKind::zero:
      return 0.0;
    case PotentialKind::gaussian:
      return spec.amplitude * std::exp(-spec.range * r * r);
    case PotentialKind::soft_coulomb:
      return spec.amplitude / std::sqrt(r * r + spec.softening * spec.softening);
    case PotentialKind::yukawa_regularized:
      return spec.amplitude * std::exp(-spec.range * r) /
             std::pow(r * r + spec.softening * spec.softening, 0.5 * spec.exponent);
    case PotentialKind::grid_sampled:
      throw std::logic_error("grid_sampled is not radial");
  }
  return 0.0;
}

}  // namespace

RealField sample(const PotentialSpec& spec, const GridPtr& grid) {
  spec.validate();
  const std::size_t n = grid->site_count();
  RealField out(grid);

  if (spec.kind == PotentialKind::grid_sampled) {
    if (spec.samples.size() != n)
      throw std::invalid_argument("grid_sampled: sample count does not match grid");
    for (std::size_t m = 0; m < n; ++m)
      out.values[static_cast<Eigen::Index>(m)] = spec.samples[m];
  } else {
    for (std::size_t m = 0; m < n; ++m)
      out.values[static_cast<Eigen::Index>(m)] =
          evaluate_radial(spec, grid->min_image_radius(m));
  }

  // Evenness under m -> -m (per axis, mod M), exact after averaging.
  Eigen::VectorXd symmetrized(out.values.size());
  const int M = grid->points_per_axis();
  for (std::size_t m = 0; m < n; ++m) {
    int idx[3], neg[3];
    grid->unflatten(m, idx);
    for (int d = 0; d < grid->dim(); ++d) neg[d] = (M - idx[d]) % M;
    const std::size_t mirrored = grid->flatten(neg);
    symmetrized[static_cast<Eigen::Index>(m)] =
        0.5 * (out.values[static_cast<Eigen::Index>(m)] +
               out.values[static_cast<Eigen::Index>(mirrored)]);
  }
  out.values = std::move(symmetrized);
  return out;
}

CertResult certify_operator_inequality(const PotentialSpec& spec, const GridPtr& grid, double K) {
  if (!(K > 0.0)) throw std::invalid_argument("certify: K must be positive");
  const std::size_t n = grid->site_count();
  if (n > 4096)
    throw std::invalid_argument("certify: dense eigensolve capped at 4096 sites");

  // -Laplacian as a dense matrix in the orthonormal site basis.
  Eigen::MatrixXcd lap(n, n);
  Field unit(grid);
  for (std::size_t j = 0; j < n; ++j) {
    unit.values.setZero();
    unit.values[static_cast<Eigen::Index>(j)] = 1.0;
    lap.col(static_cast<Eigen::Index>(j)) = laplacian_apply(unit).values;
  }
  lap = 0.5 * (lap + lap.adjoint()).eval();

  const RealField v = sample(spec, grid);
  Eigen::MatrixXcd a = K * (Eigen::MatrixXcd::Identity(n, n) + lap);
  a.diagonal() -= v.values.array().square().matrix().cast<Complex>();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("certify: eigensolver failed");

  CertResult result;
  result.K = K;
  result.min_eig = solver.eigenvalues().minCoeff();
  result.holds = result.min_eig >= -1e-10;
  return result;
}

double find_min_certified_K(const PotentialSpec& spec, const GridPtr& grid, double rel_tol) {
  double hi = 1.0;
  while (!certify_operator_inequality(spec, grid, hi).holds) {
    hi *= 2.0;
    if (hi > 1e12) throw NumericalError("find_min_certified_K: no certifying K below 1e12");
  }
  double lo = 0.0;
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= 0.0) break;
    if (certify_operator_inequality(spec, grid, mid).holds)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace becmix
