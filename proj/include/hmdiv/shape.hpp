#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "hmdiv/errors.hpp"

namespace hmdiv {

/// Kind of the algebra attached to one unit: diagonal n x n matrices
/// (probability vectors) or the full matrix algebra M_n.
enum class UnitKind { classical, quantum };

inline std::string to_string(UnitKind kind) {
  return kind == UnitKind::classical ? "classical" : "quantum";
}

/// A subset of the units {0, ..., N-1}, packed into a bitmask.
class UnitSet {
 public:
  static constexpr int kMaxUnits = 31;

  constexpr UnitSet() = default;
  constexpr explicit UnitSet(std::uint32_t bits) : bits_(bits) {}

  static UnitSet of(std::initializer_list<int> units) {
    return of(std::vector<int>(units));
  }

  static UnitSet of(const std::vector<int>& units) {
    std::uint32_t bits = 0;
    for (int u : units) {
      if (u < 0 || u >= kMaxUnits) {
        throw InvalidSubsystem("unit index " + std::to_string(u) + " out of range");
      }
      bits |= 1u << u;
    }
    return UnitSet(bits);
  }

  /// {0, ..., n-1}
  static constexpr UnitSet first(int n) {
    return UnitSet(n <= 0 ? 0u : (n >= 32 ? ~0u : ((1u << n) - 1u)));
  }

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool contains(int i) const { return i >= 0 && i < 32 && ((bits_ >> i) & 1u) != 0; }
  constexpr bool subset_of(UnitSet other) const { return (bits_ & ~other.bits_) == 0; }
  constexpr UnitSet with(int i) const { return UnitSet(bits_ | (1u << i)); }
  constexpr UnitSet without(int i) const { return UnitSet(bits_ & ~(1u << i)); }

  /// Largest member plus one (0 for the empty set).
  constexpr int span() const { return 32 - std::countl_zero(bits_); }

  std::vector<int> members() const {
    std::vector<int> out;
    for (int i = 0; i < 32; ++i) {
      if (contains(i)) out.push_back(i);
    }
    return out;
  }

  std::string to_string() const {
    std::string s = "{";
    bool first_member = true;
    for (int i : members()) {
      if (!first_member) s += ",";
      s += std::to_string(i);
      first_member = false;
    }
    return s + "}";
  }

  friend constexpr UnitSet operator|(UnitSet a, UnitSet b) { return UnitSet(a.bits_ | b.bits_); }
  friend constexpr UnitSet operator&(UnitSet a, UnitSet b) { return UnitSet(a.bits_ & b.bits_); }
  friend constexpr bool operator==(UnitSet a, UnitSet b) = default;

 private:
  std::uint32_t bits_ = 0;
};

/// Canonical order on subsets: by cardinality, then lexicographically by members.
inline bool canonical_less(UnitSet a, UnitSet b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a.members() < b.members();
}

/// Number of units, their sizes and their kinds. Configurations are encoded
/// in mixed radix with unit 0 as the most significant digit.
class SystemShape {
 public:
  /// The trivial system with no units (dimension 1); only produced as the
  /// shape of the empty marginal.
  SystemShape() = default;

  SystemShape(std::vector<int> sizes, std::vector<UnitKind> kinds)
      : sizes_(std::move(sizes)), kinds_(std::move(kinds)) {
    if (sizes_.size() != kinds_.size()) {
      throw InvalidArgument("shape: " + std::to_string(sizes_.size()) + " sizes but " +
                            std::to_string(kinds_.size()) + " kinds");
    }
    if (static_cast<int>(sizes_.size()) > UnitSet::kMaxUnits) {
      throw InvalidArgument("shape: too many units");
    }
    for (int n : sizes_) {
      if (n < 1) throw InvalidArgument("shape: unit size must be >= 1, got " + std::to_string(n));
    }
  }

  static SystemShape uniform(int units, int size, UnitKind kind) {
    if (units < 1) throw InvalidArgument("shape: need at least one unit");
    return SystemShape(std::vector<int>(units, size), std::vector<UnitKind>(units, kind));
  }
  static SystemShape qubits(int units) { return uniform(units, 2, UnitKind::quantum); }
  static SystemShape bits(int units) { return uniform(units, 2, UnitKind::classical); }

  int units() const { return static_cast<int>(sizes_.size()); }
  int size(int i) const { return sizes_.at(i); }
  UnitKind kind(int i) const { return kinds_.at(i); }
  const std::vector<int>& sizes() const { return sizes_; }
  const std::vector<UnitKind>& kinds() const { return kinds_; }
  UnitSet all_units() const { return UnitSet::first(units()); }

  std::size_t dim() const {
    std::size_t d = 1;
    for (int n : sizes_) d *= static_cast<std::size_t>(n);
    return d;
  }

  /// Complex dimension of the unit algebra A_i: n for diagonal, n^2 for full.
  std::size_t algebra_dim(int i) const {
    const auto n = static_cast<std::size_t>(size(i));
    return kind(i) == UnitKind::classical ? n : n * n;
  }

  /// Complex dimension of the composite algebra.
  std::size_t algebra_dim() const {
    std::size_t d = 1;
    for (int i = 0; i < units(); ++i) d *= algebra_dim(i);
    return d;
  }

  bool all_classical() const {
    return std::all_of(kinds_.begin(), kinds_.end(), [](UnitKind k) { return k == UnitKind::classical; });
  }
  bool all_quantum() const {
    return std::all_of(kinds_.begin(), kinds_.end(), [](UnitKind k) { return k == UnitKind::quantum; });
  }

  /// Product of the sizes of classical units and of quantum units.
  std::size_t classical_dim() const {
    std::size_t d = 1;
    for (int i = 0; i < units(); ++i)
      if (kind(i) == UnitKind::classical) d *= static_cast<std::size_t>(size(i));
    return d;
  }
  std::size_t quantum_dim() const { return dim() / classical_dim(); }

  void check_subset(UnitSet nu) const {
    if (!nu.subset_of(all_units())) {
      throw InvalidSubsystem("subset " + nu.to_string() + " is not contained in the " +
                             std::to_string(units()) + " units");
    }
  }

  /// Shape of the subsystem nu (units kept in increasing order).
  SystemShape restrict_to(UnitSet nu) const {
    check_subset(nu);
    std::vector<int> s;
    std::vector<UnitKind> k;
    for (int i : nu.members()) {
      s.push_back(sizes_[i]);
      k.push_back(kinds_[i]);
    }
    return SystemShape(std::move(s), std::move(k));
  }

  /// Place value of each unit in the mixed-radix index.
  std::vector<std::size_t> strides() const {
    std::vector<std::size_t> st(sizes_.size(), 1);
    for (int i = units() - 2; i >= 0; --i) st[i] = st[i + 1] * static_cast<std::size_t>(sizes_[i + 1]);
    return st;
  }

  std::vector<int> digits(std::size_t index) const {
    std::vector<int> out(sizes_.size());
    for (int i = units() - 1; i >= 0; --i) {
      out[i] = static_cast<int>(index % static_cast<std::size_t>(sizes_[i]));
      index /= static_cast<std::size_t>(sizes_[i]);
    }
    return out;
  }

  std::size_t index(const std::vector<int>& digits) const {
    if (digits.size() != sizes_.size()) throw InvalidArgument("configuration has wrong length");
    std::size_t idx = 0;
    for (int i = 0; i < units(); ++i) {
      if (digits[i] < 0 || digits[i] >= sizes_[i]) throw InvalidArgument("configuration digit out of range");
      idx = idx * static_cast<std::size_t>(sizes_[i]) + static_cast<std::size_t>(digits[i]);
    }
    return idx;
  }

  std::string to_string() const {
    std::string s = "[";
    for (int i = 0; i < units(); ++i) {
      if (i) s += ",";
      s += std::to_string(sizes_[i]) + (kinds_[i] == UnitKind::classical ? "c" : "q");
    }
    return s + "]";
  }

  friend bool operator==(const SystemShape&, const SystemShape&) = default;

 private:
  std::vector<int> sizes_;
  std::vector<UnitKind> kinds_;
};

}  // namespace hmdiv
