#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace palm_forge {

/// Philox4x64-10 block function (Salmon et al., SC'11). Pure: maps a
/// 256-bit counter and a 128-bit key to 256 random bits.
struct Philox4x64 {
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static Counter block(Counter counter, Key key) noexcept;
};

/// 64-bit FNV-1a; the scenario-id hash used by the stream-split rule.
std::uint64_t scenario_hash(std::string_view id) noexcept;

/// Counter-based random stream.
///
/// Stream-split rule:
///   key     = (seed, scenario hash)
///   counter = (block index, item index, lane, 0)
///
/// Every (seed, scenario, item, lane) coordinate names an independent
/// stream, so batch items can be generated in any order or on any thread
/// with identical results. Lanes separate the purposes a single item draws
/// for (Palm config, field, inversion shift, ...).
///
/// Satisfies UniformRandomBitGenerator so it plugs into <random>
/// distributions. Bit-exact output is promised only for one standard
/// library implementation since the distribution algorithms are not
/// standardized.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed, std::uint64_t scenario = 0,
                        std::uint64_t item = 0, std::uint64_t lane = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Fresh stream for batch item `item`, same seed/scenario/lane.
  [[nodiscard]] RandomStream for_item(std::uint64_t item) const noexcept;
  /// Fresh stream on lane `lane`, same seed/scenario/item.
  [[nodiscard]] RandomStream lane(std::uint64_t lane) const noexcept;

  /// Uniform double in the open interval (0, 1), 53-bit resolution.
  double uniform_open() noexcept;
  /// Uniform double in [0, 1).
  double uniform() noexcept;

  [[nodiscard]] std::uint64_t seed() const noexcept { return key_[0]; }
  [[nodiscard]] std::uint64_t scenario() const noexcept { return key_[1]; }
  [[nodiscard]] std::uint64_t item() const noexcept { return item_; }
  [[nodiscard]] std::uint64_t lane_index() const noexcept { return lane_; }

 private:
  Philox4x64::Key key_;
  std::uint64_t item_;
  std::uint64_t lane_;
  std::uint64_t block_ = 0;
  Philox4x64::Counter buffer_{};
  unsigned used_ = 4;
};

/// Lanes used by the library's own pipelines.
namespace lanes {
inline constexpr std::uint64_t kPalm = 1;
inline constexpr std::uint64_t kField = 2;
inline constexpr std::uint64_t kInversion = 3;
inline constexpr std::uint64_t kReplica = 4;
inline constexpr std::uint64_t kCheck = 5;
}  // namespace lanes

}  // namespace palm_forge
