#include "becmix/fock_basis.hpp"

#include <stdexcept>
#include <string>

namespace becmix {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const std::uint64_t factor = n - k + i;
    if (result > UINT64_MAX / factor) throw std::overflow_error("binomial overflow");
    result = result * factor / i;  // exact: product of i consecutive integers
  }
  return result;
}

FockBasis FockBasis::build(int modes, long particles, std::size_t cap) {
  if (modes < 2) throw std::invalid_argument("FockBasis: need at least 2 modes");
  if (particles < 1) throw std::invalid_argument("FockBasis: need at least 1 particle");

  const std::uint64_t expected =
      binomial(static_cast<std::uint64_t>(particles) + modes - 1,
               static_cast<std::uint64_t>(particles));
  if (expected > cap)
    throw std::invalid_argument("FockBasis: dimension " + std::to_string(expected) +
                                " exceeds cap " + std::to_string(cap));

  FockBasis basis;
  basis.modes_ = modes;
  basis.particles_ = particles;
  basis.size_ = static_cast<std::size_t>(expected);
  basis.states_.reserve(basis.size_ * static_cast<std::size_t>(modes));

  // Pascal rows up to particles+modes, columns capped at modes-1; that is
  // all the ranking needs, and it keeps the table linear in N.
  const std::size_t rows = static_cast<std::size_t>(particles) + modes + 1;
  const std::size_t cols = static_cast<std::size_t>(modes);
  basis.choose_.assign(rows * cols, 0);
  basis.choose_cols_ = cols;
  for (std::size_t n = 0; n < rows; ++n) {
    basis.choose_[n * cols] = 1;
    for (std::size_t k = 1; k < cols && k <= n; ++k)
      basis.choose_[n * cols + k] =
          basis.choose_[(n - 1) * cols + k - 1] +
          ((k <= n - 1) ? basis.choose_[(n - 1) * cols + k] : 0);
  }

  // Enumerate occupation vectors with the first mode descending.
  std::vector<int> occ(static_cast<std::size_t>(modes), 0);
  occ[0] = static_cast<int>(particles);
  std::size_t count = 0;
  while (true) {
    basis.states_.insert(basis.states_.end(), occ.begin(), occ.end());
    ++count;

    // Successor: take one particle from the rightmost movable mode and
    // gather it with everything to its right into the next slot.
    int j = modes - 2;
    while (j >= 0 && occ[j] == 0) --j;
    if (j < 0) break;
    int gathered = 1;
    for (int i = j + 1; i < modes; ++i) {
      gathered += occ[i];
      occ[i] = 0;
    }
    occ[j] -= 1;
    occ[j + 1] = gathered;
  }

  if (count != basis.size_) throw std::logic_error("FockBasis: enumeration miscount");
  return basis;
}

// Rank in the descending-first-mode order: states with a larger occupation
// in the current slot come first, and there are C(R-v-1 + m-1, m-1) states
// for remainders below v (hockey-stick collapsed).
std::size_t FockBasis::index_of(std::span<const int> occupation) const {
  if (!contains(occupation)) throw std::out_of_range("FockBasis: state not in basis");
  std::size_t rank = 0;
  long remaining = particles_;
  for (int slot = 0; slot + 1 < modes_; ++slot) {
    const int n = occupation[static_cast<std::size_t>(slot)];
    const long below = remaining - n - 1;  // remainder budget for larger v
    const int m = modes_ - slot - 1;       // slots to the right
    if (below >= 0)
      rank += static_cast<std::size_t>(
          choose_[static_cast<std::size_t>(below + m) * choose_cols_ +
                  static_cast<std::size_t>(m)]);
    remaining -= n;
  }
  return rank;
}

bool FockBasis::contains(std::span<const int> occupation) const {
  if (occupation.size() != static_cast<std::size_t>(modes_)) return false;
  long total = 0;
  for (int v : occupation) {
    if (v < 0) return false;
    total += v;
  }
  return total == particles_;
}

std::shared_ptr<const JointBasis> JointBasis::build(int modes, const std::vector<long>& particles,
                                                    std::size_t component_cap) {
  if (particles.empty()) throw std::invalid_argument("JointBasis: need at least one component");
  auto basis = std::shared_ptr<JointBasis>(new JointBasis());
  basis->modes_ = modes;
  basis->particles_ = particles;
  basis->component_.reserve(particles.size());
  basis->dimension_ = 1;
  for (long n : particles) {
    basis->component_.push_back(FockBasis::build(modes, n, component_cap));
    const std::size_t d = basis->component_.back().size();
    if (basis->dimension_ > SIZE_MAX / d)
      throw std::overflow_error("JointBasis: dimension overflow");
    basis->dimension_ *= d;
  }
  // Row-major strides, component 0 slowest.
  basis->stride_.assign(particles.size(), 1);
  for (int q = static_cast<int>(particles.size()) - 2; q >= 0; --q)
    basis->stride_[q] = basis->stride_[q + 1] * basis->component_[q + 1].size();
  return basis;
}

std::size_t JointBasis::joint_index(std::span<const std::size_t> per_component) const {
  std::size_t joint = 0;
  for (std::size_t q = 0; q < component_.size(); ++q)
    joint += per_component[q] * stride_[q];
  return joint;
}

void JointBasis::decompose(std::size_t joint, std::span<std::size_t> per_component) const {
  for (std::size_t q = 0; q < component_.size(); ++q) {
    per_component[q] = joint / stride_[q];
    joint %= stride_[q];
  }
}

}  // namespace becmix
