#include <algorithm>

#include "domainkit/simd/kernels.hpp"

namespace domainkit::simd {
namespace {

void minhash_update_scalar(const std::uint64_t* shingles, std::size_t n_shingles,
                           const std::uint64_t* mul, const std::uint64_t* add, std::uint64_t* sig,
                           std::size_t n_perm) {
  for (std::size_t j = 0; j < n_perm; ++j) {
    std::uint64_t m = sig[j];
    for (std::size_t i = 0; i < n_shingles; ++i) m = std::min(m, permute(shingles[i], mul[j], add[j]));
    sig[j] = m;
  }
}

std::size_t count_equal_scalar(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
  std::size_t eq = 0;
  for (std::size_t i = 0; i < n; ++i) eq += a[i] == b[i] ? 1 : 0;
  return eq;
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{Isa::scalar, &minhash_update_scalar, &count_equal_scalar};
  return k;
}

}  // namespace domainkit::simd
