#include <immintrin.h>

#include "domainkit/simd/kernels.hpp"

namespace domainkit::simd {
namespace {

// Low 64 bits of a 64x64 product from three 32x32->64 multiplies.
inline __m256i mullo_epi64(__m256i a, __m256i b) {
  const __m256i lo = _mm256_mul_epu32(a, b);
  const __m256i a_hi_b = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), b);
  const __m256i a_b_hi = _mm256_mul_epu32(a, _mm256_srli_epi64(b, 32));
  const __m256i cross = _mm256_slli_epi64(_mm256_add_epi64(a_hi_b, a_b_hi), 32);
  return _mm256_add_epi64(lo, cross);
}

inline __m256i min_epu64(__m256i a, __m256i b) {
  const __m256i bias = _mm256_set1_epi64x(static_cast<long long>(0x8000000000000000ULL));
  const __m256i a_gt_b =
      _mm256_cmpgt_epi64(_mm256_xor_si256(a, bias), _mm256_xor_si256(b, bias));
  return _mm256_blendv_epi8(a, b, a_gt_b);
}

void minhash_update_avx2(const std::uint64_t* shingles, std::size_t n_shingles,
                         const std::uint64_t* mul, const std::uint64_t* add, std::uint64_t* sig,
                         std::size_t n_perm) {
  std::size_t j = 0;
  for (; j + 4 <= n_perm; j += 4) {
    const __m256i m = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(mul + j));
    const __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(add + j));
    __m256i acc = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(sig + j));
    for (std::size_t i = 0; i < n_shingles; ++i) {
      const __m256i x = _mm256_set1_epi64x(static_cast<long long>(shingles[i]));
      __m256i v = _mm256_add_epi64(mullo_epi64(x, m), a);
      v = _mm256_xor_si256(v, _mm256_srli_epi64(v, 29));
      acc = min_epu64(acc, v);
    }
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(sig + j), acc);
  }
  for (; j < n_perm; ++j) {
    std::uint64_t best = sig[j];
    for (std::size_t i = 0; i < n_shingles; ++i) {
      const std::uint64_t v = permute(shingles[i], mul[j], add[j]);
      best = v < best ? v : best;
    }
    sig[j] = best;
  }
}

std::size_t count_equal_avx2(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
  std::size_t eq = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    const int mask = _mm256_movemask_pd(_mm256_castsi256_pd(_mm256_cmpeq_epi64(va, vb)));
    eq += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
  }
  for (; i < n; ++i) eq += a[i] == b[i] ? 1 : 0;
  return eq;
}

}  // namespace

const Kernels& avx2_kernels() {
  static const Kernels k{Isa::avx2, &minhash_update_avx2, &count_equal_avx2};
  return k;
}

}  // namespace domainkit::simd
