#include "himc/retention_cache.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace himc {

RetentionCache::RetentionCache(std::string name, LevelGeometry geometry,
                               std::vector<RegionParams> regions)
    : name_(std::move(name)), geometry_(geometry), regions_(std::move(regions)) {
  if (regions_.empty() || regions_.size() > 2)
    throw ConfigError(name_ + ": a cache needs one or two retention regions");
  sets_.resize(geometry_.sets());
  for (auto& s : sets_) s.resize(geometry_.associativity);
}

void RetentionCache::check_monotone(cycles_t now) {
  if (now < last_now_) throw std::logic_error(name_ + ": cache time moved backwards");
  last_now_ = now;
}

RetentionCache::Way* RetentionCache::find(block_id_t block) {
  auto& set = sets_[set_of(block)];
  for (auto& way : set)
    if (way.valid && way.block == block) return &way;
  return nullptr;
}

const RetentionCache::Way* RetentionCache::find(block_id_t block) const {
  const auto& set = sets_[set_of(block)];
  for (const auto& way : set)
    if (way.valid && way.block == block) return &way;
  return nullptr;
}

void RetentionCache::expire_until(cycles_t now) {
  while (!flags_.empty() && flags_.top().flag_time <= now) {
    FlagEntry entry = flags_.top();
    flags_.pop();
    Way* way = find(entry.block);
    if (!way || way->write_stamp != entry.write_stamp) continue;  // rewritten since
    ExpiredBlock ev{entry.block, way->region, way->dirty, entry.flag_time};
    if (way->dirty)
      ++stats_.expire_writebacks;
    else
      ++stats_.expire_invalidations;
    way->valid = false;
    if (on_expiry_) on_expiry_(ev);
  }
}

void RetentionCache::mark_written(Way& way, cycles_t now) {
  way.last_write = now;
  way.write_stamp = ++stamp_counter_;
  way.lru_tick = ++lru_counter_;
  const RegionParams& rp = regions_[way.region];
  if (rp.expires()) flags_.push({now + rp.flag_cycles(), way.write_stamp, way.block});
}

RetentionCache::Way& RetentionCache::choose_victim(std::uint64_t set, AccessOutcome& out) {
  auto& ways = sets_[set];
  Way* victim = nullptr;
  for (auto& way : ways) {
    if (!way.valid) return way;
    if (!victim || way.lru_tick < victim->lru_tick) victim = &way;
  }
  out.victims.push_back({victim->block, victim->region, victim->dirty});
  if (victim->dirty)
    ++stats_.evictions_dirty;
  else
    ++stats_.evictions_clean;
  victim->valid = false;
  return *victim;
}

BlockView RetentionCache::probe(block_id_t block, cycles_t now) {
  check_monotone(now);
  expire_until(now);
  BlockView view;
  const Way* way = find(block);
  if (!way) return view;
  view.resident = true;
  view.region = way->region;
  view.dirty = way->dirty;
  view.last_write = way->last_write;
  view.counter_state = counter_state(block, now);
  return view;
}

std::uint32_t RetentionCache::counter_state(block_id_t block, cycles_t now) const {
  const Way* way = find(block);
  if (!way) return 0;
  const RegionParams& rp = regions_[way->region];
  if (!rp.expires()) return 0;
  cycles_t elapsed = now - way->last_write;
  std::uint64_t ticks = elapsed / rp.period_cycles();
  return static_cast<std::uint32_t>(
      std::min<std::uint64_t>(ticks, rp.counter.n_states - 1));
}

AccessOutcome RetentionCache::read(block_id_t block, cycles_t now) {
  check_monotone(now);
  expire_until(now);
  AccessOutcome out;
  ++stats_.reads;
  Way* way = find(block);
  if (!way) return out;  // miss: hierarchy charges the fill path
  ++stats_.read_hits;
  out.hit = true;
  const DeviceParams& dev = regions_[way->region].device;
  out.cycles = dev.read_latency;
  out.energy_fj[way->region] = static_cast<fj_t>(geometry_.block_bits()) * dev.read_energy_fj;
  way->lru_tick = ++lru_counter_;
  return out;
}

AccessOutcome RetentionCache::write(block_id_t block, std::uint8_t region, cycles_t now) {
  check_monotone(now);
  expire_until(now);
  if (region >= regions_.size()) throw std::invalid_argument(name_ + ": no such region");
  AccessOutcome out;
  ++stats_.writes;
  Way* way = find(block);
  if (way) {
    out.hit = true;
    if (way->region != region) {
      way->region = region;  // single tag entry keeps residency unique
      out.latch_flipped = true;
      ++stats_.latch_flips;
    }
  } else {
    Way& slot = choose_victim(set_of(block), out);
    slot.valid = true;
    slot.block = block;
    slot.region = region;
    way = &slot;
  }
  way->dirty = true;
  mark_written(*way, now);
  const DeviceParams& dev = regions_[region].device;
  out.cycles = dev.write_latency;
  out.energy_fj[region] = static_cast<fj_t>(geometry_.block_bits()) * dev.write_energy_fj;
  return out;
}

AccessOutcome RetentionCache::install(block_id_t block, std::uint8_t region, cycles_t now,
                                      bool dirty) {
  check_monotone(now);
  expire_until(now);
  if (region >= regions_.size()) throw std::invalid_argument(name_ + ": no such region");
  AccessOutcome out;
  ++stats_.installs;
  Way* way = find(block);
  if (!way) {
    Way& slot = choose_victim(set_of(block), out);
    slot.valid = true;
    slot.block = block;
    way = &slot;
  } else if (way->region != region) {
    out.latch_flipped = true;
    ++stats_.latch_flips;
  }
  way->region = region;
  way->dirty = dirty;
  mark_written(*way, now);
  const DeviceParams& dev = regions_[region].device;
  out.cycles = dev.write_latency;
  out.energy_fj[region] = static_cast<fj_t>(geometry_.block_bits()) * dev.write_energy_fj;
  return out;
}

AccessOutcome RetentionCache::transfer_to_low(block_id_t block, cycles_t now) {
  check_monotone(now);
  expire_until(now);
  if (regions_.size() < 2) throw std::logic_error(name_ + ": transfer needs a low bank");
  AccessOutcome out;
  Way* way = find(block);
  if (!way) return out;  // caller re-fetches
  out.hit = true;
  if (way->region == kRegionLow) return out;  // idempotent, zero cost
  const DeviceParams& from = regions_[way->region].device;
  const DeviceParams& to = regions_[kRegionLow].device;
  out.cycles = from.read_latency + to.write_latency;
  out.energy_fj[way->region] = static_cast<fj_t>(geometry_.block_bits()) * from.read_energy_fj;
  out.energy_fj[kRegionLow] += static_cast<fj_t>(geometry_.block_bits()) * to.write_energy_fj;
  way->region = kRegionLow;
  out.latch_flipped = true;
  ++stats_.latch_flips;
  ++stats_.transfers;
  mark_written(*way, now);
  return out;
}

AccessOutcome RetentionCache::note_compute_dest(block_id_t block, std::uint8_t region,
                                                cycles_t now) {
  check_monotone(now);
  expire_until(now);
  AccessOutcome out;
  Way* way = find(block);
  if (!way) {
    Way& slot = choose_victim(set_of(block), out);
    slot.valid = true;
    slot.block = block;
    way = &slot;
  } else if (way->region != region) {
    out.latch_flipped = true;
    ++stats_.latch_flips;
  }
  way->region = region;
  way->dirty = true;
  mark_written(*way, now);
  return out;  // op energy already covers the result store
}

void RetentionCache::invalidate(block_id_t block) {
  Way* way = find(block);
  if (way) way->valid = false;
}

CounterOverhead counter_overhead_report(const CounterConfig& cfg) {
  CounterOverhead rep;
  std::uint32_t bits = 0;
  while ((1u << bits) < cfg.n_states) ++bits;
  rep.bits_per_block = bits;
  rep.area_fraction_percent = 0.78 * static_cast<double>(bits) / 2.0;
  return rep;
}

}  // namespace himc
