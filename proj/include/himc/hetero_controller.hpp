#pragma once

#include <cstdint>

#include "himc/retention_cache.hpp"

namespace himc {

/// What the cache controller must do before a pending in-array instruction
/// can execute on one operand.
enum class OperandAction : std::uint8_t {
  Ready,          ///< resident in the compute region, unexpired
  NeedsTransfer,  ///< resident in the other retention region
  NeedsFetch,     ///< not resident; fetch from the next level
};

/// Bank-steering front end of a dual-retention cache: reads follow the
/// per-block latch, writes steer it, and operands destined for in-array
/// compute are moved into the low-retention bank on demand.
class HeteroBankController {
 public:
  HeteroBankController(RetentionCache& cache, std::uint8_t compute_region)
      : cache_(cache), compute_region_(compute_region) {}

  std::uint8_t compute_region() const { return compute_region_; }

  /// Latch-directed bank selection; high-retention for unmapped blocks.
  std::uint8_t resolve_bank(block_id_t block, cycles_t now) {
    return cache_.probe(block, now).region;
  }

  /// Write steered by the address's retention bit.
  AccessOutcome write_with_retention(block_id_t block, bool low_retention, cycles_t now) {
    std::uint8_t region = low_retention && cache_.region_count() > 1 ? kRegionLow : kRegionHigh;
    return cache_.write(block, region, now);
  }

  AccessOutcome transfer_to_low_bank(block_id_t block, cycles_t now) {
    return cache_.transfer_to_low(block, now);
  }

  OperandAction operand_action(block_id_t block, cycles_t now) {
    BlockView view = cache_.probe(block, now);
    if (!view.resident) return OperandAction::NeedsFetch;
    if (view.region != compute_region_) return OperandAction::NeedsTransfer;
    return OperandAction::Ready;
  }

  RetentionCache& cache() { return cache_; }

 private:
  RetentionCache& cache_;
  std::uint8_t compute_region_;
};

}  // namespace himc
