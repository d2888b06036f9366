#pragma once

#include <array>
#include <cstdint>

namespace tsrv {

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Separates the random streams consumed by different stages of one replication.
enum class RngDomain : std::uint32_t
{
  LatentPath    = 0,
  Contamination = 1,
  Test          = 0xFFFF,
};

/// Counter-based generator keyed by a 64-bit seed and addressed by (domain, stream, block).
///
/// Two generators built from equal arguments produce identical sequences on every
/// platform that shares the libm used by `normal()`. Copies are independent and
/// continue from the same position, so a copied generator replays the original.
class CounterRng
{
public:
  CounterRng(std::uint64_t seed, std::uint64_t stream, RngDomain domain = RngDomain::LatentPath) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }
  RngDomain domain() const noexcept { return domain_; }

  /// Next raw 64-bit word.
  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1) with 53 bits of resolution.
  double uniform();
  /// Standard normal deviate (Box-Muller on two 53-bit uniforms).
  double normal();

private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  RngDomain domain_;
  std::uint32_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int words_left_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

} // namespace tsrv
