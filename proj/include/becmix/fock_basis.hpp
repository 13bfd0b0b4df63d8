#pragma once

// Occupation-number bases: the fixed-N bosonic basis for one component on M
// grid modes, and the joint (tensor product across components) basis.
//
// Ordering: states are listed with the first mode's occupation descending,
// i.e. (N,0,...,0) first and (0,...,0,N) last, a strict total order. Joint
// indices are row-major with component 0 slowest.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace becmix {

// binomial(n, k) computed exactly in 64 bit; throws std::overflow_error.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

class FockBasis {
 public:
  static FockBasis build(int modes, long particles, std::size_t cap = 200000);

  int modes() const { return modes_; }
  long particles() const { return particles_; }
  std::size_t size() const { return size_; }

  std::span<const int> state(std::size_t i) const {
    return {states_.data() + i * static_cast<std::size_t>(modes_),
            static_cast<std::size_t>(modes_)};
  }
  int occupation(std::size_t i, int mode) const {
    return states_[i * static_cast<std::size_t>(modes_) + static_cast<std::size_t>(mode)];
  }
  // Index of an occupation vector; throws std::out_of_range if absent.
  std::size_t index_of(std::span<const int> occupation) const;
  bool contains(std::span<const int> occupation) const;

 private:
  FockBasis() = default;

  int modes_ = 0;
  long particles_ = 0;
  std::size_t size_ = 0;
  std::vector<int> states_;  // size_ * modes_, row-major
  // Binomial table C(n, k) for n <= particles+modes, k <= modes-1, used by
  // the exact combinatorial ranking in index_of.
  std::vector<std::uint64_t> choose_;
  std::size_t choose_cols_ = 0;
};

class JointBasis {
 public:
  static std::shared_ptr<const JointBasis> build(int modes, const std::vector<long>& particles,
                                                 std::size_t component_cap = 200000);

  int components() const { return static_cast<int>(component_.size()); }
  int modes() const { return modes_; }
  const FockBasis& component(int q) const { return component_.at(q); }
  const std::vector<long>& particle_numbers() const { return particles_; }
  std::size_t dimension() const { return dimension_; }

  std::size_t joint_index(std::span<const std::size_t> per_component) const;
  void decompose(std::size_t joint, std::span<std::size_t> per_component) const;

 private:
  JointBasis() = default;

  int modes_ = 0;
  std::vector<long> particles_;
  std::vector<FockBasis> component_;
  std::vector<std::size_t> stride_;
  std::size_t dimension_ = 0;
};

using JointBasisPtr = std::shared_ptr<const JointBasis>;

}  // namespace becmix
