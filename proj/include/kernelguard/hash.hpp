#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace kernelguard {

/// Incremental 64-bit FNV-1a. Used for corpus and catalog fingerprints.
class Fnv1a {
 public:
  Fnv1a& update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= kPrime;
    }
    return *this;
  }

  // Field separator so ("ab","c") and ("a","bc") hash differently.
  Fnv1a& field(std::string_view bytes) {
    update(bytes);
    state_ ^= 0xffu;
    state_ *= kPrime;
    return *this;
  }

  std::uint64_t value() const { return state_; }

 private:
  static constexpr std::uint64_t kOffset = 0xcbf29ce484222325ULL;
  static constexpr std::uint64_t kPrime = 0x100000001b3ULL;
  std::uint64_t state_ = kOffset;
};

std::string to_hex(std::uint64_t value);
std::uint64_t from_hex(std::string_view hex);

}  // namespace kernelguard
