#pragma once

// Unit-cube equidistributed sequences. Every generator here is a pure
// function of (index, coordinate), so prefixes are stable by construction.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>

#include "svmcs/error.hpp"

namespace svmcs::seq {

inline constexpr std::size_t max_sobol_dim = 16;
inline constexpr int sobol_bits = 32;

// Joe & Kuo (2008) new-joe-kuo-6.21201, dimensions 2..16. Dimension 1 is
// the van der Corput sequence in base 2.
struct SobolPoly {
  unsigned s;
  unsigned a;
  std::array<std::uint32_t, 6> m;
};

inline constexpr std::array<SobolPoly, max_sobol_dim - 1> sobol_polys{{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
}};

using SobolDirections = std::array<std::array<std::uint32_t, sobol_bits>, max_sobol_dim>;

inline constexpr SobolDirections make_sobol_directions() {
  SobolDirections v{};
  for (int i = 0; i < sobol_bits; ++i) v[0][i] = std::uint32_t{1} << (31 - i);
  for (std::size_t dim = 1; dim < max_sobol_dim; ++dim) {
    const auto& poly = sobol_polys[dim - 1];
    auto& vd = v[dim];
    const unsigned s = poly.s;
    for (unsigned i = 0; i < s; ++i) vd[i] = poly.m[i] << (31 - i);
    for (unsigned i = s; i < static_cast<unsigned>(sobol_bits); ++i) {
      vd[i] = vd[i - s] ^ (vd[i - s] >> s);
      for (unsigned k = 1; k < s; ++k) vd[i] ^= ((poly.a >> (s - 1 - k)) & 1u) * vd[i - k];
    }
  }
  return v;
}

inline constexpr SobolDirections sobol_directions = make_sobol_directions();

// Term n >= 1 in Gray-code order (the all-zero term n = 0 is skipped by
// callers), so coordinate 0 runs 0.5, 0.75, 0.25, ...
inline double sobol(std::uint64_t n, std::size_t coord) {
  if (coord >= max_sobol_dim)
    fail(errc::unsupported_dimension, "Sobol directions are tabulated for d <= 16");
  if (n >> sobol_bits) fail(errc::unsupported_dimension, "Sobol index exceeds 2^32");
  const std::uint64_t gray = n ^ (n >> 1);
  std::uint32_t x = 0;
  const auto& v = sobol_directions[coord];
  for (int b = 0; b < sobol_bits; ++b)
    if ((gray >> b) & 1u) x ^= v[b];
  return static_cast<double>(x) * 0x1p-32;
}

// Irrational generator stored as an unevaluated double-double hi + lo.
struct DoubleDouble {
  double hi;
  double lo;
};

// frac(n * (hi + lo)). The product n*hi is split exactly with fma so the
// only error left is the representation error of the generator itself,
// which grows like n * 1e-32; accuracy is ~1e-15 up to n ~ 1e7 and degrades
// linearly beyond that.
inline double frac_mul(std::uint64_t n, DoubleDouble g) {
  const double nd = static_cast<double>(n);
  const double p = nd * g.hi;
  const double perr = std::fma(nd, g.hi, -p);
  double f = p - std::floor(p);
  f += perr + nd * g.lo;
  f -= std::floor(f);
  return f >= 1.0 ? 0.0 : f;
}

inline constexpr std::array<unsigned, 64> first_primes{
    2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,  53,
    59,  61,  67,  71,  73,  79,  83,  89,  97,  101, 103, 107, 109, 113, 127, 131,
    137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223,
    227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311};

inline constexpr std::size_t max_weyl_dim = first_primes.size();

// sqrt of the k-th prime.
inline DoubleDouble weyl_generator(std::size_t coord) {
  if (coord >= max_weyl_dim) fail(errc::unsupported_dimension, "Weyl sequence supports d <= 64");
  const double p = first_primes[coord];
  const double hi = std::sqrt(p);
  const double lo = std::fma(-hi, hi, p) / (2.0 * hi);
  return {hi, lo};
}

// exp(1/(k+1)) for coordinate k = 0, 1, ...
inline DoubleDouble baker_generator(std::size_t coord) {
  const long double r = 1.0L / static_cast<long double>(coord + 1);
  const long double e = std::exp(r);
  const double hi = static_cast<double>(e);
  const double lo = static_cast<double>(e - static_cast<long double>(hi));
  return {hi, lo};
}

inline double weyl(std::uint64_t n, std::size_t coord) {
  return frac_mul(n, weyl_generator(coord));
}

inline double baker(std::uint64_t n, std::size_t coord) {
  return frac_mul(n, baker_generator(coord));
}

// Counter-based uniform in [0,1): a keyed splitmix64 finalizer over
// (seed, index, coord). No state, so any term is reproducible on its own.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t index, std::uint64_t coord) {
  std::uint64_t h = mix64(seed ^ 0x5851f42d4c957f2dull);
  h = mix64(h ^ index);
  return mix64(h ^ (coord * 0xd1342543de82ef95ull + 1));
}

inline double monte_carlo(std::uint64_t seed, std::uint64_t n, std::size_t coord) {
  return static_cast<double>(counter_hash(seed, n, coord) >> 11) * 0x1p-53;
}

}  // namespace svmcs::seq
