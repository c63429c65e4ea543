#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace domainkit {

struct Hash128 {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  friend bool operator==(const Hash128&, const Hash128&) = default;
};

// MurmurHash3 x64 128-bit variant. Output is identical across platforms
// (blocks are read little-endian).
Hash128 murmur3_128(std::string_view data, std::uint64_t seed = 0);

inline std::uint64_t hash64(std::string_view data, std::uint64_t seed = 0) {
  return murmur3_128(data, seed).lo;
}

// 32 lowercase hex chars, high word first.
std::string to_hex(const Hash128& h);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace domainkit
