#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "himc/bitline.hpp"
#include "himc/common.hpp"

namespace himc {

/// Process-variation study inputs. Currents are normalized so one parallel
/// cell conducts exactly 1.0; R_AP = (1 + tmr_ratio) x R_P.
struct VariationSpec {
  double tmr_ratio = 1.5;
  double sigma_fraction = 0.05;  ///< relative std-dev of each cell resistance
  std::uint32_t n_samples = 10000;
  std::uint64_t seed = 1;
};

enum class SenseClass : std::uint8_t { PP = 0, Mixed = 1, ApAp = 2 };

struct ClassStats {
  double mean = 0.0;
  double stddev = 0.0;
  std::uint32_t count = 0;
};

/// Per-class normalized sense-current samples. AP-P and P-AP are pooled into
/// one Mixed class (identical current by symmetry of parallel sensing).
struct MarginSamples {
  std::array<std::vector<double>, 3> samples;  // indexed by SenseClass
  std::array<ClassStats, 3> stats;
};

struct References {
  double i_ref_and = 0.0;  ///< separates AP-AP from Mixed
  double i_ref_or = 0.0;   ///< separates Mixed from P-P
};

struct BoundaryMargin {
  double reference = 0.0;
  double sigma_normalized = 0.0;  ///< min over the two adjacent classes of |mean - ref| / std
};

struct MarginReport {
  VariationSpec spec;
  MarginSamples samples;
  References refs;
  BoundaryMargin and_boundary;  ///< AP-AP vs Mixed
  BoundaryMargin or_boundary;   ///< Mixed vs P-P
  std::uint64_t misclassified = 0;
  double misclassification_rate = 0.0;
};

/// Draws n_samples resistance pairs per class (truncated Gaussians on R) and
/// converts them to normalized currents. Counter-indexed streams make the
/// result independent of any work partitioning.
MarginSamples sample_currents(const VariationSpec& spec);

/// Places each reference at the sigma-normalized equal-error point between
/// the adjacent class distributions; falls back to the arithmetic midpoint
/// when both spreads are zero.
References choose_references(const MarginSamples& samples);

inline SenseLevel classify(double current, const References& refs) {
  if (current < refs.i_ref_and) return SenseLevel::BothOne;
  if (current < refs.i_ref_or) return SenseLevel::Mixed;
  return SenseLevel::BothZero;
}

MarginReport margin_report(const VariationSpec& spec);

std::string margin_report_json(const MarginReport& report);
/// Histogram CSV: fixed 0.005-wide bins over [0, 3), one row per bin with
/// per-class counts.
std::string margin_histogram_csv(const MarginReport& report);

}  // namespace himc
