#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace reconnect {

// Counter-based random stream: the j-th draw of stream (seed, id) is a fixed
// integer hash of (seed, id, j). Streams with distinct ids can be handed to
// replicas with no coordination, and every draw sequence is reproducible
// bit-for-bit on any platform (pure 64-bit integer arithmetic).
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(uint64_t seed, uint64_t stream_id);

  uint64_t next_u64();
  double uniform01();                  // [0, 1)
  uint32_t uniform_below(uint32_t n);  // uniform on {0, ..., n-1}, unbiased
  bool coin();
  double normal01();
  double exponential(double rate);

  uint64_t seed() const { return seed_; }
  uint64_t stream_id() const { return stream_id_; }

 private:
  uint64_t seed_;
  uint64_t stream_id_;
  uint64_t key_;
  uint64_t tweak_;
  uint64_t counter_ = 0;
};

/// Poisson(lam) draw; exact for all lam >= 0.
int64_t poisson_draw(RngStream& rng, double lam);

/// Gamma(alpha, beta) draw (shape alpha, rate beta); valid for alpha < 1 too.
double gamma_draw(RngStream& rng, double alpha, double beta);

/// Binomial(n, p) draw.
int64_t binomial_draw(RngStream& rng, int64_t n, double p);

/// Index draw proportional to non-negative weights.
std::size_t categorical_draw(RngStream& rng, const std::vector<double>& weights);

}  // namespace reconnect
