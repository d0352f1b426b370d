#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mdlmd {

using Rng = std::mt19937_64;

// Deterministic child seed from a master seed and a path of labels such as
// (component, repetition, bootstrap index). SplitMix64 mixing per step.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

inline Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  return Rng(derive_seed(master, path));
}

// Stable tags for derive_seed paths.
namespace stream {
inline constexpr std::uint64_t kTrain = 1;
inline constexpr std::uint64_t kTest = 2;
inline constexpr std::uint64_t kBootstrap = 3;
inline constexpr std::uint64_t kMcd = 4;
inline constexpr std::uint64_t kRepetition = 5;
inline constexpr std::uint64_t kSplit = 6;
inline constexpr std::uint64_t kFolds = 7;
inline constexpr std::uint64_t kHdlss = 8;
inline constexpr std::uint64_t kClassifier = 9;
}  // namespace stream

}  // namespace mdlmd
