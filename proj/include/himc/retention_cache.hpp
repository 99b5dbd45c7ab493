#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "himc/bitline.hpp"
#include "himc/common.hpp"
#include "himc/device_catalog.hpp"

namespace himc {

/// One retention region of a cache: a device column plus the counter that
/// guards it. Homogeneous caches have one region; the dual-retention design
/// has a high-retention region 0 and a low-retention region 1.
struct RegionParams {
  DeviceParams device;
  CounterConfig counter;

  bool expires() const { return device.retention.expires(); }
  cycles_t period_cycles() const {
    return ns_to_cycles(device.retention.duration_ns / counter.n_states);
  }
  /// Cycles after a write at which the counter raises its flag and the block
  /// is written back / invalidated.
  cycles_t flag_cycles() const {
    return static_cast<cycles_t>(counter.flag_state()) * period_cycles();
  }
};

constexpr std::uint8_t kRegionHigh = 0;
constexpr std::uint8_t kRegionLow = 1;

struct CacheStats {
  std::uint64_t reads = 0;
  std::uint64_t read_hits = 0;
  std::uint64_t writes = 0;
  std::uint64_t installs = 0;
  std::uint64_t evictions_clean = 0;
  std::uint64_t evictions_dirty = 0;
  std::uint64_t expire_writebacks = 0;
  std::uint64_t expire_invalidations = 0;
  std::uint64_t transfers = 0;
  std::uint64_t latch_flips = 0;
};

struct VictimBlock {
  block_id_t block = 0;
  std::uint8_t region = 0;
  bool dirty = false;
};

struct ExpiredBlock {
  block_id_t block = 0;
  std::uint8_t region = 0;
  bool dirty = false;
  cycles_t flag_time = 0;  ///< exactly last_write + (N-1) x clock period
};

/// Result of one cache-level operation. Latency covers only the requesting
/// access; victim writebacks drain through a write buffer and are charged as
/// energy by the hierarchy, not as added cycles.
struct AccessOutcome {
  bool hit = false;
  std::uint32_t cycles = 0;
  std::array<fj_t, 2> energy_fj{0, 0};  ///< indexed by region
  std::vector<VictimBlock> victims;
  bool latch_flipped = false;
};

struct BlockView {
  bool resident = false;
  std::uint8_t region = 0;
  bool dirty = false;
  std::uint32_t counter_state = 0;
  cycles_t last_write = 0;
};

/// Set-associative cache with per-block retention counters and, optionally, a
/// second retention region selected by a per-block latch. Counter ticks are
/// derived lazily from write timestamps; expiry callbacks fire in flag-time
/// order before any later operation touches the array.
class RetentionCache {
 public:
  using ExpiryCallback = std::function<void(const ExpiredBlock&)>;

  RetentionCache(std::string name, LevelGeometry geometry, std::vector<RegionParams> regions);

  void set_expiry_callback(ExpiryCallback cb) { on_expiry_ = std::move(cb); }

  const std::string& name() const { return name_; }
  const LevelGeometry& geometry() const { return geometry_; }
  const RegionParams& region(std::uint8_t idx) const { return regions_[idx]; }
  std::size_t region_count() const { return regions_.size(); }
  const CacheStats& stats() const { return stats_; }

  std::uint32_t bank_of(block_id_t block) const { return block % geometry_.banks; }
  std::uint32_t subarray_of(block_id_t block) const {
    return (block / geometry_.banks) % geometry_.subarrays;
  }
  bool bitline_aligned(block_id_t a, block_id_t b) const {
    return bank_of(a) == bank_of(b) && subarray_of(a) == subarray_of(b);
  }

  /// Latch-directed residency; expiry is settled before answering.
  BlockView probe(block_id_t block, cycles_t now);

  /// Regular read. A miss costs nothing here; the owning hierarchy charges
  /// the fill path.
  AccessOutcome read(block_id_t block, cycles_t now);

  /// Full-block write steered by the retention bit (region). Resets the
  /// counter, sets dirty, and keeps residency unique when the latch flips.
  AccessOutcome write(block_id_t block, std::uint8_t region, cycles_t now);

  /// Fill from the next level (clean) or writeback from above (dirty).
  AccessOutcome install(block_id_t block, std::uint8_t region, cycles_t now, bool dirty);

  /// Read from the current bank plus a write into the low-retention bank; a
  /// no-op when the block already lives there.
  AccessOutcome transfer_to_low(block_id_t block, cycles_t now);

  /// Marks the destination of an in-array operation: valid, dirty, counter
  /// reset. Costs nothing because op energy already includes the result
  /// store; may still evict a victim to make room.
  AccessOutcome note_compute_dest(block_id_t block, std::uint8_t region, cycles_t now);

  void invalidate(block_id_t block);

  /// Settles all counter flags with flag_time <= now.
  void expire_until(cycles_t now);

  std::uint32_t counter_state(block_id_t block, cycles_t now) const;

 private:
  struct Way {
    bool valid = false;
    bool dirty = false;
    block_id_t block = 0;
    std::uint8_t region = 0;
    cycles_t last_write = 0;
    std::uint64_t write_stamp = 0;
    std::uint64_t lru_tick = 0;
  };

  struct FlagEntry {
    cycles_t flag_time;
    std::uint64_t write_stamp;
    block_id_t block;
    bool operator>(const FlagEntry& o) const {
      return flag_time != o.flag_time ? flag_time > o.flag_time : write_stamp > o.write_stamp;
    }
  };

  std::uint64_t set_of(block_id_t block) const { return block % geometry_.sets(); }
  Way* find(block_id_t block);
  const Way* find(block_id_t block) const;
  Way& choose_victim(std::uint64_t set, AccessOutcome& out);
  void mark_written(Way& way, cycles_t now);
  void check_monotone(cycles_t now);

  std::string name_;
  LevelGeometry geometry_;
  std::vector<RegionParams> regions_;
  std::vector<std::vector<Way>> sets_;
  std::priority_queue<FlagEntry, std::vector<FlagEntry>, std::greater<FlagEntry>> flags_;
  ExpiryCallback on_expiry_;
  CacheStats stats_;
  std::uint64_t stamp_counter_ = 0;
  std::uint64_t lru_counter_ = 0;
  cycles_t last_now_ = 0;
};

struct CounterOverhead {
  std::uint32_t bits_per_block = 0;
  double area_fraction_percent = 0.0;
};

/// Per-block monitor-counter cost: ceil(log2 N) bits; 0.78% block area at the
/// default two-bit counter, scaled proportionally to bit count otherwise.
CounterOverhead counter_overhead_report(const CounterConfig& cfg);

}  // namespace himc
