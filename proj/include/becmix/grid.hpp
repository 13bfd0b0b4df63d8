#pragma once

// Periodic spatial grids, unitary spectral transforms, the spectral
// Laplacian, and periodic convolution. All wavefunction norms and inner
// products are h-weighted quadratures, so a Field with inner_product(f,f)=1
// is L2-normalized in the physical sense.
//
// Conventions (fixed once, used everywhere):
//   * sites x_m = m*h, m = 0..M-1, h = L/M, per axis
//   * wavenumbers k_m = 2*pi*s(m)/L with s(m) = m for m <= (M-1)/2 and
//     m - M otherwise; the even-M Nyquist mode is the negative one (-pi*M/L)
//   * forward transform F_k = (h/sqrt(L))^dim * sum_m f_m exp(-i k.x_m),
//     which is unitary from the h-weighted site space to plain l2:
//     inner_product(f,f) == sum_k |F_k|^2

#include <complex>
#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace becmix {

using Complex = std::complex<double>;

// Raised when a computation leaves the representable regime (NaN/Inf,
// lost realness, failed convergence). The CLI maps it to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PeriodicGrid {
 public:
  ~PeriodicGrid();
  PeriodicGrid(const PeriodicGrid&) = delete;
  PeriodicGrid& operator=(const PeriodicGrid&) = delete;

  int dim() const { return dim_; }
  int points_per_axis() const { return points_; }
  double length_per_axis() const { return length_; }
  double spacing() const { return spacing_; }
  std::size_t site_count() const { return sites_; }
  double cell_volume() const { return cell_volume_; }  // h^dim

  // Signed wavenumber for a single axis index.
  const std::vector<double>& axis_wavenumbers() const { return wavenumbers_; }
  // |k|^2 per flattened site index (row-major across axes).
  const Eigen::VectorXd& k_squared() const { return k_squared_; }

  double axis_coordinate(int m) const { return m * spacing_; }
  // Signed minimum-image displacement for an axis index difference.
  double min_image_displacement(int m) const;
  // Euclidean norm of the minimum-image displacement of a flattened index.
  double min_image_radius(std::size_t flat) const;

  void unflatten(std::size_t flat, int out[3]) const;
  std::size_t flatten(const int idx[3]) const;

  bool same_shape(const PeriodicGrid& other) const {
    return dim_ == other.dim_ && points_ == other.points_ &&
           length_ == other.length_;
  }

  // Physically normalized transforms (see header comment).
  Eigen::VectorXcd forward(const Eigen::VectorXcd& site_values) const;
  Eigen::VectorXcd inverse(const Eigen::VectorXcd& mode_coeffs) const;
  // Unnormalized DFT pair (FFTW conventions); exposed for oracles.
  Eigen::VectorXcd raw_forward(const Eigen::VectorXcd& v) const;
  Eigen::VectorXcd raw_inverse(const Eigen::VectorXcd& v) const;

 private:
  friend std::shared_ptr<const PeriodicGrid> make_grid(int, int, double);
  PeriodicGrid(int dim, int points, double length);

  int dim_;
  int points_;
  double length_;
  double spacing_;
  std::size_t sites_;
  double cell_volume_;
  std::vector<double> wavenumbers_;
  Eigen::VectorXd k_squared_;
  double forward_scale_;
  void* plan_forward_;   // fftw_plan, opaque here
  void* plan_backward_;
};

using GridPtr = std::shared_ptr<const PeriodicGrid>;

// dim in {1,2,3}, M >= 2 points per axis, L > 0.
GridPtr make_grid(int dim, int points_per_axis, double length_per_axis);

// Complex field (wavefunction samples) on a grid.
struct Field {
  GridPtr grid;
  Eigen::VectorXcd values;

  Field() = default;
  explicit Field(GridPtr g)
      : grid(std::move(g)), values(Eigen::VectorXcd::Zero(grid->site_count())) {}
  Field(GridPtr g, Eigen::VectorXcd v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != static_cast<Eigen::Index>(grid->site_count()))
      throw std::invalid_argument("Field: value count does not match grid");
  }
};

// Real field (potentials, densities) on a grid.
struct RealField {
  GridPtr grid;
  Eigen::VectorXd values;

  RealField() = default;
  explicit RealField(GridPtr g)
      : grid(std::move(g)), values(Eigen::VectorXd::Zero(grid->site_count())) {}
  RealField(GridPtr g, Eigen::VectorXd v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != static_cast<Eigen::Index>(grid->site_count()))
      throw std::invalid_argument("RealField: value count does not match grid");
  }
};

void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b);

// h^dim * sum_m conj(f_m) g_m; conjugate-linear in f.
Complex inner_product(const Field& f, const Field& g);
double norm(const Field& f);

Field forward_transform(const Field& f);
Field inverse_transform(const Field& f);

// Applies -Laplacian (a nonnegative operator; plane waves are eigenvectors
// with eigenvalue |k|^2).
Field laplacian_apply(const Field& f);

// h^dim-weighted circular convolution of two real fields, computed
// spectrally. Throws NumericalError if the result fails to be real.
RealField convolve_periodic(const RealField& v, const RealField& rho);

}  // namespace becmix
