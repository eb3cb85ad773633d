#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

namespace attrq {

using Level = std::uint8_t;

/// A full assignment of component levels, component 0 first.
using State = std::vector<Level>;

/// Mixed-radix integer encoding of a State (component 0 least significant).
///
/// Backed by a 128-bit word so that models with up to 127 Boolean components
/// (or an equivalent product of multi-valued domains) encode without loss.
class StateCode {
 public:
  using Rep = unsigned __int128;

  constexpr StateCode() = default;
  constexpr explicit StateCode(Rep value) : value_(value) {}

  constexpr Rep value() const noexcept { return value_; }

  constexpr auto operator<=>(const StateCode&) const = default;

  /// Decimal rendering of the code.
  std::string to_string() const;

 private:
  Rep value_ = 0;
};

struct StateCodeHash {
  std::size_t operator()(StateCode code) const noexcept {
    // splitmix64 finalizer over both halves
    auto mix = [](std::uint64_t x) {
      x += 0x9e3779b97f4a7c15ULL;
      x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
      x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
      return x ^ (x >> 31);
    };
    const auto v = code.value();
    return static_cast<std::size_t>(mix(static_cast<std::uint64_t>(v)) ^
                                    (mix(static_cast<std::uint64_t>(v >> 64)) << 1));
  }
};

/// Probability mass keyed by state.
using SparseDistribution = std::unordered_map<StateCode, double, StateCodeHash>;

}  // namespace attrq

template <>
struct std::hash<attrq::StateCode> : attrq::StateCodeHash {};
