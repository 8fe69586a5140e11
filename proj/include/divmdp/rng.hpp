#pragma once

#include <cstdint>
#include <random>

namespace divmdp {

// Engine for a (master seed, stream, substream) triple. std::seed_seq and
// std::mt19937_64 are fully specified by the standard, so derived streams
// are reproducible across platforms and independent of worker count.
inline std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t stream = 0,
                                   std::uint64_t substream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(master),
                      static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32),
                      static_cast<std::uint32_t>(substream),
                      static_cast<std::uint32_t>(substream >> 32)};
    return std::mt19937_64(seq);
}

// Uniform double in [0,1) from the top 53 bits; bit-reproducible.
inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace divmdp
