#include "becmix/grid.hpp"

#include <cmath>
#include <mutex>

#include <fftw3.h>

namespace becmix {

namespace {

// FFTW's planner is not thread-safe; executing distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

PeriodicGrid::PeriodicGrid(int dim, int points, double length)
    : dim_(dim), points_(points), length_(length) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("make_grid: dim must be 1, 2 or 3");
  if (points < 2) throw std::invalid_argument("make_grid: need at least 2 points per axis");
  if (!(length > 0.0)) throw std::invalid_argument("make_grid: length must be positive");

  spacing_ = length_ / points_;
  sites_ = 1;
  for (int d = 0; d < dim_; ++d) sites_ *= static_cast<std::size_t>(points_);
  cell_volume_ = std::pow(spacing_, dim_);

  // Signed convention: negative frequencies occupy the upper half of the
  // index range; the even-M Nyquist mode is -pi*M/L.
  wavenumbers_.resize(points_);
  for (int m = 0; m < points_; ++m) {
    const int s = (m <= (points_ - 1) / 2) ? m : m - points_;
    wavenumbers_[m] = 2.0 * M_PI * s / length_;
  }

  k_squared_.resize(sites_);
  for (std::size_t flat = 0; flat < sites_; ++flat) {
    int idx[3];
    unflatten(flat, idx);
    double k2 = 0.0;
    for (int d = 0; d < dim_; ++d) k2 += wavenumbers_[idx[d]] * wavenumbers_[idx[d]];
    k_squared_[static_cast<Eigen::Index>(flat)] = k2;
  }

  forward_scale_ = std::pow(spacing_ / std::sqrt(length_), dim_);

  // Plans are created once on dummy buffers; execution uses the new-array
  // interface with caller-local buffers. FFTW_UNALIGNED keeps the plans
  // valid for any buffer alignment.
  std::vector<Complex> dummy_in(sites_), dummy_out(sites_);
  int n[3] = {points_, points_, points_};
  std::lock_guard<std::mutex> lock(planner_mutex());
  plan_forward_ = fftw_plan_dft(dim_, n, as_fftw(dummy_in.data()), as_fftw(dummy_out.data()),
                                FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_backward_ = fftw_plan_dft(dim_, n, as_fftw(dummy_in.data()), as_fftw(dummy_out.data()),
                                 FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plan_forward_ || !plan_backward_) throw NumericalError("make_grid: FFTW planning failed");
}

PeriodicGrid::~PeriodicGrid() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_backward_));
}

double PeriodicGrid::min_image_displacement(int m) const {
  const int r = ((m % points_) + points_) % points_;
  return (r <= points_ / 2) ? r * spacing_ : (r - points_) * spacing_;
}

double PeriodicGrid::min_image_radius(std::size_t flat) const {
  int idx[3];
  unflatten(flat, idx);
  double r2 = 0.0;
  for (int d = 0; d < dim_; ++d) {
    const double x = min_image_displacement(idx[d]);
    r2 += x * x;
  }
  return std::sqrt(r2);
}

void PeriodicGrid::unflatten(std::size_t flat, int out[3]) const {
  for (int d = dim_ - 1; d >= 0; --d) {
    out[d] = static_cast<int>(flat % points_);
    flat /= points_;
  }
  for (int d = dim_; d < 3; ++d) out[d] = 0;
}

std::size_t PeriodicGrid::flatten(const int idx[3]) const {
  std::size_t flat = 0;
  for (int d = 0; d < dim_; ++d) {
    const int r = ((idx[d] % points_) + points_) % points_;
    flat = flat * points_ + static_cast<std::size_t>(r);
  }
  return flat;
}

Eigen::VectorXcd PeriodicGrid::raw_forward(const Eigen::VectorXcd& v) const {
  if (v.size() != static_cast<Eigen::Index>(sites_))
    throw std::invalid_argument("transform: size mismatch");
  Eigen::VectorXcd in = v, out(v.size());
  fftw_execute_dft(static_cast<fftw_plan>(plan_forward_), as_fftw(in.data()), as_fftw(out.data()));
  return out;
}

Eigen::VectorXcd PeriodicGrid::raw_inverse(const Eigen::VectorXcd& v) const {
  if (v.size() != static_cast<Eigen::Index>(sites_))
    throw std::invalid_argument("transform: size mismatch");
  Eigen::VectorXcd in = v, out(v.size());
  fftw_execute_dft(static_cast<fftw_plan>(plan_backward_), as_fftw(in.data()), as_fftw(out.data()));
  return out;
}

Eigen::VectorXcd PeriodicGrid::forward(const Eigen::VectorXcd& site_values) const {
  return forward_scale_ * raw_forward(site_values);
}

Eigen::VectorXcd PeriodicGrid::inverse(const Eigen::VectorXcd& mode_coeffs) const {
  return raw_inverse(mode_coeffs) / (forward_scale_ * static_cast<double>(sites_));
}

void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("fields live on different grids");
}

Complex inner_product(const Field& f, const Field& g) {
  require_same_grid(*f.grid, *g.grid);
  return f.grid->cell_volume() * f.values.dot(g.values);
}

double norm(const Field& f) {
  return std::sqrt(f.grid->cell_volume()) * f.values.norm();
}

Field forward_transform(const Field& f) { return {f.grid, f.grid->forward(f.values)}; }

Field inverse_transform(const Field& f) { return {f.grid, f.grid->inverse(f.values)}; }

Field laplacian_apply(const Field& f) {
  Eigen::VectorXcd modes = f.grid->raw_forward(f.values);
  modes.array() *= f.grid->k_squared().array();
  return {f.grid, f.grid->raw_inverse(modes) / static_cast<double>(f.grid->site_count())};
}

RealField convolve_periodic(const RealField& v, const RealField& rho) {
  require_same_grid(*v.grid, *rho.grid);
  const auto& grid = *v.grid;
  const Eigen::VectorXcd fv = grid.raw_forward(v.values.cast<Complex>());
  const Eigen::VectorXcd fr = grid.raw_forward(rho.values.cast<Complex>());
  const Eigen::VectorXcd prod = fv.cwiseProduct(fr);
  const Eigen::VectorXcd conv =
      grid.raw_inverse(prod) * (grid.cell_volume() / static_cast<double>(grid.site_count()));

  const double scale = std::max(1.0, conv.cwiseAbs().maxCoeff());
  if (conv.imag().cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw NumericalError("convolve_periodic: result is not real");
  return {v.grid, conv.real()};
}

GridPtr make_grid(int dim, int points_per_axis, double length_per_axis) {
  return std::shared_ptr<const PeriodicGrid>(
      new PeriodicGrid(dim, points_per_axis, length_per_axis));
}

}  // namespace becmix
