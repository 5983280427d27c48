// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The lll-lab Authors

#pragma once

#include <concepts>
#include <cstdint>
#include <optional>
#include <vector>

#include "lll/instance.hpp"

namespace lll {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t combine_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
  return mix64(seed ^ mix64(salt + 0x632BE59BD9B4E019ULL));
}

/// Small sequential generator for instance generation and sampling. Unlike
/// std distributions its output is identical across standard libraries.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_ - 0x9E3779B97F4A7C15ULL);
  }
  /// Uniform in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * bound) >> 64);
  }
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  template <class T>
  void shuffle(std::vector<T>& v) noexcept {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::uint64_t state_;
};

/// Anything that answers x_index for a variable.
template <class S>
concept ValueSource = requires(const S& s, VarId x, std::size_t index) {
  { s.value(x, index) } -> std::convertible_to<Value>;
};

/// Counter-mode randomness table: entry (x, i) is a pure function of
/// (seed, x, i), mapped through the inverse CDF of x's distribution. The
/// first `depth_hint` entries of each column are materialized up front;
/// later indices are computed on demand, so the table never mutates.
class RandomnessTable {
 public:
  RandomnessTable(const Instance& inst, std::uint64_t seed, std::size_t depth_hint)
      : seed_(seed), depth_hint_(depth_hint) {
    if (depth_hint_ < 1) throw ValidationError("depth_hint must be >= 1");
    cdf_.reserve(inst.num_vars());
    for (const auto& var : inst.variables()) {
      std::vector<double> c(var.domain_size);
      double acc = 0.0;
      for (std::uint32_t i = 0; i < var.domain_size; ++i) c[i] = (acc += var.distribution[i]);
      cdf_.push_back(std::move(c));
    }
    cache_.resize(cdf_.size() * depth_hint_);
    for (VarId x = 0; x < cdf_.size(); ++x)
      for (std::size_t i = 0; i < depth_hint_; ++i) cache_[x * depth_hint_ + i] = compute(x, i);
  }

  /// Default initial column length: ceil(10 log_{1/p} n) + 8.
  static std::size_t default_depth_hint(const Instance& inst) {
    return static_cast<std::size_t>(std::ceil(10.0 * inst.log_inv_p_n())) + 8;
  }

  [[nodiscard]] Value value(VarId x, std::size_t index) const {
    if (x >= cdf_.size()) throw ValidationError("unknown variable id " + std::to_string(x));
    if (index < depth_hint_) return cache_[x * depth_hint_ + index];
    return compute(x, index);
  }

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::size_t depth_hint() const noexcept { return depth_hint_; }
  [[nodiscard]] std::size_t num_vars() const noexcept { return cdf_.size(); }

 private:
  [[nodiscard]] Value compute(VarId x, std::size_t index) const {
    const std::uint64_t h = mix64(combine_seed(seed_, x) ^ mix64(index * 0xD1B54A32D192ED03ULL));
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    const auto& c = cdf_[x];
    for (std::size_t k = 0; k + 1 < c.size(); ++k)
      if (u < c[k]) return static_cast<Value>(k);
    // Skip trailing zero-probability values if rounding pushed u past the mass.
    for (std::size_t k = c.size(); k-- > 0;)
      if (k == 0 || c[k] > c[k - 1]) return static_cast<Value>(k);
    return 0;
  }

  std::uint64_t seed_;
  std::size_t depth_hint_;
  std::vector<std::vector<double>> cdf_;
  std::vector<Value> cache_;
};

inline RandomnessTable sample_table(const Instance& inst, std::uint64_t seed, std::size_t depth_hint) {
  return RandomnessTable(inst, seed, depth_hint);
}

inline RandomnessTable sample_table(const Instance& inst, std::uint64_t seed) {
  return RandomnessTable(inst, seed, RandomnessTable::default_depth_hint(inst));
}

/// A source that pins selected variables to a constant in every table
/// position and defers to the base source otherwise.
template <ValueSource Base>
class PinnedSource {
 public:
  PinnedSource(const Base& base, std::vector<std::optional<Value>> pins)
      : base_(&base), pins_(std::move(pins)) {}

  [[nodiscard]] Value value(VarId x, std::size_t index) const {
    if (x < pins_.size() && pins_[x]) return *pins_[x];
    return base_->value(x, index);
  }

 private:
  const Base* base_;
  std::vector<std::optional<Value>> pins_;
};

}  // namespace lll
