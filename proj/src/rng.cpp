#include "reconnect/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace reconnect {

namespace {

inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace

RngStream::RngStream(uint64_t seed, uint64_t stream_id)
    : seed_(seed),
      stream_id_(stream_id),
      key_(mix64(seed ^ kGolden)),
      tweak_(mix64(stream_id ^ 0xD1B54A32D192ED03ULL)) {}

uint64_t RngStream::next_u64() {
  ++counter_;
  // Two mixing rounds over (key, tweak, counter); counter-based, no carried state.
  return mix64(mix64(counter_ * kGolden + key_) ^ tweak_);
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

uint32_t RngStream::uniform_below(uint32_t n) {
  // Lemire's multiply-shift with rejection; unbiased.
  uint64_t x = next_u64() >> 32;
  uint64_t m = x * n;
  uint32_t l = static_cast<uint32_t>(m);
  if (l < n) {
    uint32_t t = (~n + 1u) % n;  // 2^32 mod n
    while (l < t) {
      x = next_u64() >> 32;
      m = x * n;
      l = static_cast<uint32_t>(m);
    }
  }
  return static_cast<uint32_t>(m >> 32);
}

bool RngStream::coin() { return (next_u64() & 1u) != 0; }

double RngStream::normal01() {
  // Box-Muller; u1 in (0,1] so the log is finite.
  double u1 = 1.0 - uniform01();
  double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

double RngStream::exponential(double rate) {
  if (rate <= 0.0) throw std::invalid_argument("exponential: rate must be > 0");
  return -std::log(1.0 - uniform01()) / rate;
}

namespace {

// Hoermann's PTRS transformed-rejection sampler, exact for lam >= 10.
int64_t poisson_ptrs(RngStream& rng, double lam) {
  const double b = 0.931 + 2.53 * std::sqrt(lam);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_lam = std::log(lam);
  for (;;) {
    double u = rng.uniform01() - 0.5;
    double v = rng.uniform01();
    double us = 0.5 - std::fabs(u);
    double kf = std::floor((2.0 * a / us + b) * u + lam + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<int64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    double k = kf;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_lam - lam - std::lgamma(k + 1.0)) {
      return static_cast<int64_t>(kf);
    }
  }
}

}  // namespace

int64_t poisson_draw(RngStream& rng, double lam) {
  if (lam < 0.0 || !std::isfinite(lam)) throw std::invalid_argument("poisson_draw: bad lambda");
  if (lam == 0.0) return 0;
  if (lam < 10.0) {
    // Product-of-uniforms inversion.
    double limit = std::exp(-lam);
    double prod = 1.0;
    int64_t k = -1;
    do {
      prod *= rng.uniform01();
      ++k;
    } while (prod > limit);
    return k;
  }
  return poisson_ptrs(rng, lam);
}

double gamma_draw(RngStream& rng, double alpha, double beta) {
  if (alpha <= 0.0 || beta <= 0.0) throw std::invalid_argument("gamma_draw: bad parameters");
  if (alpha < 1.0) {
    // Boost: Gamma(a) = Gamma(a+1) * U^(1/a).
    double u = 1.0 - rng.uniform01();
    return gamma_draw(rng, alpha + 1.0, beta) * std::pow(u, 1.0 / alpha);
  }
  // Marsaglia-Tsang squeeze.
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal01();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u = 1.0 - rng.uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / beta;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / beta;
  }
}

int64_t binomial_draw(RngStream& rng, int64_t n, double p) {
  if (n < 0 || p < 0.0 || p > 1.0) throw std::invalid_argument("binomial_draw: bad parameters");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  if (p > 0.5) return n - binomial_draw(rng, n, 1.0 - p);
  if (n <= 64) {
    int64_t k = 0;
    for (int64_t i = 0; i < n; ++i) k += (rng.uniform01() < p);
    return k;
  }
  // Waiting-time (geometric skip) method; expected cost O(n*p).
  const double log_q = std::log1p(-p);
  int64_t k = 0;
  int64_t i = 0;
  for (;;) {
    double u = 1.0 - rng.uniform01();
    i += 1 + static_cast<int64_t>(std::floor(std::log(u) / log_q));
    if (i > n) return k;
    ++k;
  }
}

std::size_t categorical_draw(RngStream& rng, const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("categorical_draw: negative weight");
    total += w;
  }
  if (total <= 0.0) throw std::invalid_argument("categorical_draw: zero total weight");
  double u = rng.uniform01() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return weights.size() - 1;
}

}  // namespace reconnect
