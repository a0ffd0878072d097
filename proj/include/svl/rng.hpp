#pragma once

#include <cstdint>
#include <random>

namespace svl {

// splitmix64; used to whiten user seeds and derive substream seeds.
// https://prng.di.unimi.it/splitmix64.c
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for independent substream `index` of a master seed. Used so that
// replication i of an experiment is reproducible regardless of scheduling.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
}

// Every stochastic routine in the library draws through this wrapper, so a
// seed pins the full output of a run.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  double gamma(double shape) {
    std::gamma_distribution<double> g(shape, 1.0);
    return g(engine_);
  }

  double student_t(double nu) {
    std::student_t_distribution<double> t(nu);
    return t(engine_);
  }

  double sign() { return uniform_(engine_) < 0.5 ? -1.0 : 1.0; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
};

}  // namespace svl
