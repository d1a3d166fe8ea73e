#pragma once

#include <cstdint>
#include <random>

namespace alasso {

// Deterministic randomness for instance generation and probe sampling.
//
// The engine is the standard 64-bit Mersenne Twister (mt19937_64).  Floating
// point draws are built directly on its raw 64-bit output rather than on
// std::*_distribution, whose internals are implementation-defined; this keeps
// every draw bit-reproducible for a given platform and seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Standard normal via the Box-Muller transform (pairs cached).
  double normal();

  // Uniform integer in [0, n), n >= 1, via rejection sampling (unbiased).
  int uniform_int(int n);

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Derives an independent sub-seed from a master seed and a stream index using
// the splitmix64 finalizer.  Stream assignments are fixed per use site, so
// adding a new consumer never shifts the randomness of existing ones.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace alasso
