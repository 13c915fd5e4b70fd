#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace ordwalk {

/// Philox4x32-10 block function (Salmon et al., Random123). Pure: the same
/// (counter, key) always maps to the same four words.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic child stream id for (parent, tag).
std::uint64_t derive_stream(std::uint64_t parent, std::uint64_t tag);
std::uint64_t derive_stream(std::uint64_t parent, std::string_view tag);

/// Counter-based random stream. The i-th 64-bit draw of a stream is
/// philox(counter = (i/2, stream_id), key = seed) so every uniform is a pure
/// function of (seed, stream_id, position). Distinct stream ids give
/// independent sequences for the same seed.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_(stream_id) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }
  std::uint64_t position() const { return pos_; }

  RngStream child(std::uint64_t tag) const { return {seed_, derive_stream(stream_, tag)}; }
  RngStream child(std::string_view tag) const { return {seed_, derive_stream(stream_, tag)}; }

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t pos_ = 0;
  std::array<std::uint32_t, 4> block_{};
  bool has_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace ordwalk
