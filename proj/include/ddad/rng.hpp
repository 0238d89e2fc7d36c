// Seeded random streams. Every stream is derived from a master seed and a
// path of counters (trajectory index, trial index, role, ...), so the data a
// stream produces never depends on how many other streams exist or on the
// order in which they are consumed.
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "ddad/types.hpp"

namespace ddad {

std::uint64_t splitmix64(std::uint64_t x);

/// Hash (master, path...) into an independent 64-bit stream seed.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double standard_normal() { return normal_(engine_); }

    /// n i.i.d. draws from N(0, variance).
    Vector gaussian(Index n, double variance);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ddad
