#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace symadapt {

// Deterministic RNG. mt19937_64 output is fixed by the standard; all value
// mappings are done explicitly here so that identical seeds give identical
// streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1).
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Exponential with given rate via inverse CDF.
  double exponential(double rate) {
    double u = uniform01();
    return -std::log1p(-u) / rate;
  }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(uniform01() * (hi - lo + 1));
  }

  // Independent child stream; splitmix64 mixes the stream id into the seed.
  static Rng split(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return Rng(x);
  }

 private:
  std::mt19937_64 gen_;
};

// Gray-code Sobol sequence, direction numbers from the standard Joe-Kuo
// table (first ten dimensions are ample for the state/input boxes used here).
class SobolSequence {
 public:
  explicit SobolSequence(int dim) : dim_(dim), x_(dim, 0u), index_(0) {
    if (dim < 1 || dim > 10) throw std::invalid_argument("SobolSequence: dim must be in [1,10]");
    v_.resize(dim);
    init_direction_numbers();
  }

  // Next point in [0,1)^dim. The first point is the origin.
  std::vector<double> next() {
    std::vector<double> p(dim_);
    for (int j = 0; j < dim_; ++j) p[j] = static_cast<double>(x_[j]) * 0x1.0p-32;
    std::uint32_t k = index_++;
    int c = 0;
    while (k & 1u) {
      ++c;
      k >>= 1;
    }
    for (int j = 0; j < dim_; ++j) x_[j] ^= v_[j][c];
    return p;
  }

 private:
  void init_direction_numbers() {
    // degree s, polynomial coefficient a, initial m values (Joe-Kuo "new-joe-kuo-6").
    struct Entry {
      int s;
      std::uint32_t a;
      std::uint32_t m[5];
    };
    static constexpr Entry kTable[9] = {
        {1, 0, {1, 0, 0, 0, 0}},   // dim 2
        {2, 1, {1, 3, 0, 0, 0}},   // dim 3
        {3, 1, {1, 3, 1, 0, 0}},   // dim 4
        {3, 2, {1, 1, 1, 0, 0}},   // dim 5
        {4, 1, {1, 1, 3, 3, 0}},   // dim 6
        {4, 4, {1, 3, 5, 13, 0}},  // dim 7
        {5, 2, {1, 1, 5, 5, 17}},  // dim 8
        {5, 4, {1, 1, 5, 5, 5}},   // dim 9
        {5, 7, {1, 1, 7, 11, 19}}  // dim 10
    };
    constexpr int kBits = 32;
    for (int j = 0; j < dim_; ++j) {
      v_[j].assign(kBits, 0u);
      if (j == 0) {
        for (int i = 0; i < kBits; ++i) v_[0][i] = 1u << (31 - i);
        continue;
      }
      const Entry& e = kTable[j - 1];
      std::vector<std::uint32_t> m(kBits);
      for (int i = 0; i < e.s; ++i) m[i] = e.m[i];
      for (int i = e.s; i < kBits; ++i) {
        m[i] = m[i - e.s] ^ (m[i - e.s] << e.s);
        for (int k = 1; k < e.s; ++k)
          m[i] ^= ((e.a >> (e.s - 1 - k)) & 1u) * (m[i - k] << k);
      }
      for (int i = 0; i < kBits; ++i) v_[j][i] = m[i] << (31 - i);
    }
  }

  int dim_;
  std::vector<std::vector<std::uint32_t>> v_;
  std::vector<std::uint32_t> x_;
  std::uint32_t index_;
};

// `count` Sobol points mapped into an axis-aligned box.
inline std::vector<std::vector<double>> sobol_box(
    int count, std::span<const std::pair<double, double>> box) {
  SobolSequence seq(static_cast<int>(box.size()));
  std::vector<std::vector<double>> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) {
    auto p = seq.next();
    for (size_t j = 0; j < box.size(); ++j) p[j] = box[j].first + (box[j].second - box[j].first) * p[j];
    pts.push_back(std::move(p));
  }
  return pts;
}

}  // namespace symadapt
