#include <cstdlib>
#include <string>

#include "domainkit/simd/kernels.hpp"

namespace domainkit::simd {

#if defined(DOMAINKIT_HAVE_AVX2)
const Kernels& avx2_kernels();
#endif

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "scalar";
}

const Kernels* kernels_for(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return &scalar_kernels();
    case Isa::avx2:
#if defined(DOMAINKIT_HAVE_AVX2)
      if (__builtin_cpu_supports("avx2")) return &avx2_kernels();
#endif
      return nullptr;
  }
  return nullptr;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2}) {
    if (kernels_for(isa)) out.push_back(isa);
  }
  return out;
}

const Kernels& active_kernels() {
  static const Kernels& chosen = [] () -> const Kernels& {
    if (const char* forced = std::getenv("DOMAINKIT_SIMD"); forced && *forced) {
      const std::string want(forced);
      for (Isa isa : available_isas()) {
        if (to_string(isa) == want) return *kernels_for(isa);
      }
      return scalar_kernels();
    }
    const Kernels* best = &scalar_kernels();
    for (Isa isa : available_isas()) best = kernels_for(isa);
    return *best;
  }();
  return chosen;
}

void minhash_update(std::span<const std::uint64_t> shingles, std::span<const std::uint64_t> mul,
                    std::span<const std::uint64_t> add, std::span<std::uint64_t> sig,
                    const Kernels& k) {
  k.minhash_update(shingles.data(), shingles.size(), mul.data(), add.data(), sig.data(), sig.size());
}

std::size_t count_equal(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                        const Kernels& k) {
  return k.count_equal(a.data(), b.data(), std::min(a.size(), b.size()));
}

}  // namespace domainkit::simd
