#pragma once

#include <cstdint>
#include <string>

namespace semred {

/** FNV-1a 64-bit over a byte string, starting from `seed`. */
inline uint64_t fnv1a64(const std::string& bytes,
                        uint64_t seed = 0xcbf29ce484222325ull)
{
  uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/** Fold an integer into an FNV state; used to derive per-item seeds. */
inline uint64_t fnv1a64_mix(uint64_t h, uint64_t value)
{
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (8 * i)) & 0xff;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string to_hex(uint64_t value);

/** Read a whole file; throws semred::Error when it cannot be opened. */
std::string read_file(const std::string& path);

void write_file(const std::string& path, const std::string& contents);

}  // namespace semred
