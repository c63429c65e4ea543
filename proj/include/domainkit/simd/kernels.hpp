#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

// Data-parallel inner loops of MinHash signature construction. Each kernel has
// a portable scalar reference and optional vector variants; the variant is
// picked once at runtime from CPU features (override with DOMAINKIT_SIMD=scalar).
// All variants are bit-identical.
namespace domainkit::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

// The per-coordinate hash permutation: v = x * mul + add (mod 2^64), then
// v ^= v >> 29. `mul` must be odd so the map is a bijection.
constexpr std::uint64_t permute(std::uint64_t x, std::uint64_t mul, std::uint64_t add) {
  std::uint64_t v = x * mul + add;
  return v ^ (v >> 29);
}

struct Kernels {
  Isa isa;
  // sig[j] = min(sig[j], min_i permute(shingles[i], mul[j], add[j])), j < n_perm
  void (*minhash_update)(const std::uint64_t* shingles, std::size_t n_shingles,
                         const std::uint64_t* mul, const std::uint64_t* add, std::uint64_t* sig,
                         std::size_t n_perm);
  // Number of positions where a[i] == b[i].
  std::size_t (*count_equal)(const std::uint64_t* a, const std::uint64_t* b, std::size_t n);
};

const Kernels& scalar_kernels();
// nullptr when the variant is not compiled in or the CPU lacks the feature.
const Kernels* kernels_for(Isa isa);
std::vector<Isa> available_isas();
const Kernels& active_kernels();

void minhash_update(std::span<const std::uint64_t> shingles, std::span<const std::uint64_t> mul,
                    std::span<const std::uint64_t> add, std::span<std::uint64_t> sig,
                    const Kernels& k = active_kernels());
std::size_t count_equal(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                        const Kernels& k = active_kernels());

}  // namespace domainkit::simd
