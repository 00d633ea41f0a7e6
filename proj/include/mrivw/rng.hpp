#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mrivw {

/// What a substream is used for. Separate purposes get independent streams,
/// so adding draws of one kind never shifts the draws of another.
enum class StreamPurpose : std::uint64_t {
  VariantEffects = 1,
  Genotypes = 2,
  IndividualNoise = 3,
};

using Engine = std::mt19937_64;

/// An engine whose state is a pure function of the key words. Each 64-bit
/// word is split into two 32-bit halves and fed through std::seed_seq.
Engine make_substream(std::initializer_list<std::uint64_t> key);

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace mrivw
