#pragma once

#include <cstdint>
#include <random>

namespace mmwloc {

using Rng = std::mt19937_64;

// Seed derivation for reproducible substreams.
//
// Every random draw in the library flows from one top-level seed. A child
// stream is identified by (parent seed, stream tag, index) and seeded with
// splitmix64 applied to the mixed triple, so substreams are independent of
// evaluation order and of the worker count:
//
//   experiment seed --(StreamTag::Trial, t)------> trial seed
//   trial seed      --(StreamTag::Synthesis, 0)--> measurement noise
//   trial seed      --(StreamTag::Estimator, 0)--> GapfConfig::rng_seed
//   rng_seed        --(StreamTag::Resample, k)---> resampler of iteration k
//   rng_seed        --(StreamTag::Particle, k*N+i)-> spread of particle i
enum class StreamTag : std::uint64_t {
    Trial = 1,
    Synthesis = 2,
    Estimator = 3,
    Resample = 4,
    Particle = 5,
    Sweep = 6,
    Trajectory = 7,
    Start = 8,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, StreamTag tag, std::uint64_t index) noexcept {
    std::uint64_t h = splitmix64(parent);
    h = splitmix64(h ^ (static_cast<std::uint64_t>(tag) * 0xd6e8feb86659fd93ULL));
    return splitmix64(h ^ index);
}

inline Rng make_rng(std::uint64_t parent, StreamTag tag, std::uint64_t index) {
    return Rng(derive_seed(parent, tag, index));
}

}  // namespace mmwloc
