#include "himc/margins.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace himc {

namespace {

void check_spec(const VariationSpec& spec) {
  if (!(spec.tmr_ratio > 0.0)) throw std::invalid_argument("variation spec: tmr_ratio must be > 0");
  if (!(spec.sigma_fraction >= 0.0 && spec.sigma_fraction < 0.5))
    throw std::invalid_argument("variation spec: sigma_fraction must lie in [0, 0.5)");
  if (spec.n_samples < 1) throw std::invalid_argument("variation spec: n_samples must be >= 1");
}

/// Stream seed for sample `index` of class `cls`; each sample owns an
/// independent generator so the draw order never matters.
SplitMix sample_stream(std::uint64_t seed, unsigned cls, std::uint64_t index) {
  std::uint64_t s = seed;
  s = splitmix64(s) ^ (0x517CC1B727220A95ull * (cls + 1));
  s = splitmix64(s) ^ index;
  splitmix64(s);
  return SplitMix(s);
}

/// One resistance draw ~ Normal(nominal, sigma x nominal) truncated to R > 0.
double draw_resistance(SplitMix& rng, double nominal, double sigma_fraction) {
  if (sigma_fraction == 0.0) return nominal;
  for (;;) {
    double u1 = rng.next_unit_open();
    double u2 = rng.next_unit_open();
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    double r = nominal * (1.0 + sigma_fraction * z);
    if (r > 0.0) return r;
  }
}

ClassStats stats_of(const std::vector<double>& xs) {
  ClassStats st;
  st.count = static_cast<std::uint32_t>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  st.mean = sum / static_cast<double>(xs.size());
  double sq = 0.0;
  for (double x : xs) sq += (x - st.mean) * (x - st.mean);
  double var = xs.size() > 1 ? sq / static_cast<double>(xs.size()) : 0.0;
  // Summation round-off leaves ~1e-16 dust on degenerate distributions; snap
  // it to zero so the midpoint fallback stays reachable.
  if (var < st.mean * st.mean * 1e-24) var = 0.0;
  st.stddev = std::sqrt(var);
  return st;
}

}  // namespace

MarginSamples sample_currents(const VariationSpec& spec) {
  check_spec(spec);
  const double r_p = 1.0;
  const double r_ap = 1.0 + spec.tmr_ratio;
  // Nominal resistances of the two sensed cells per class.
  const double nominals[3][2] = {{r_p, r_p}, {r_ap, r_p}, {r_ap, r_ap}};

  MarginSamples out;
  for (unsigned cls = 0; cls < 3; ++cls) {
    auto& bucket = out.samples[cls];
    bucket.resize(spec.n_samples);
    for (std::uint64_t i = 0; i < spec.n_samples; ++i) {
      SplitMix rng = sample_stream(spec.seed, cls, i);
      double r1 = draw_resistance(rng, nominals[cls][0], spec.sigma_fraction);
      double r2 = draw_resistance(rng, nominals[cls][1], spec.sigma_fraction);
      bucket[i] = 1.0 / r1 + 1.0 / r2;
    }
    out.stats[cls] = stats_of(bucket);
  }
  if (!(out.stats[0].mean > out.stats[1].mean && out.stats[1].mean > out.stats[2].mean))
    throw std::runtime_error("sense-class means lost their ordering; sigma too large");
  return out;
}

namespace {

double equal_error_point(const ClassStats& hi, const ClassStats& lo) {
  double spread = hi.stddev + lo.stddev;
  if (spread == 0.0) return 0.5 * (hi.mean + lo.mean);
  // r satisfying (hi.mean - r) / hi.std == (r - lo.mean) / lo.std.
  return (hi.mean * lo.stddev + lo.mean * hi.stddev) / spread;
}

BoundaryMargin boundary_of(const ClassStats& hi, const ClassStats& lo, double ref) {
  BoundaryMargin m;
  m.reference = ref;
  double hi_margin = hi.stddev > 0.0 ? (hi.mean - ref) / hi.stddev
                                     : std::numeric_limits<double>::infinity();
  double lo_margin = lo.stddev > 0.0 ? (ref - lo.mean) / lo.stddev
                                     : std::numeric_limits<double>::infinity();
  m.sigma_normalized = std::min(hi_margin, lo_margin);
  return m;
}

}  // namespace

References choose_references(const MarginSamples& samples) {
  const auto& pp = samples.stats[static_cast<unsigned>(SenseClass::PP)];
  const auto& mixed = samples.stats[static_cast<unsigned>(SenseClass::Mixed)];
  const auto& apap = samples.stats[static_cast<unsigned>(SenseClass::ApAp)];
  References refs;
  refs.i_ref_or = equal_error_point(pp, mixed);
  refs.i_ref_and = equal_error_point(mixed, apap);
  if (!(refs.i_ref_and < refs.i_ref_or))
    throw std::runtime_error("reference ordering violated (i_ref_and >= i_ref_or)");
  return refs;
}

MarginReport margin_report(const VariationSpec& spec) {
  MarginReport rep;
  rep.spec = spec;
  rep.samples = sample_currents(spec);
  rep.refs = choose_references(rep.samples);
  const auto& st = rep.samples.stats;
  rep.or_boundary = boundary_of(st[0], st[1], rep.refs.i_ref_or);
  rep.and_boundary = boundary_of(st[1], st[2], rep.refs.i_ref_and);

  static const SenseLevel expected[3] = {SenseLevel::BothZero, SenseLevel::Mixed,
                                         SenseLevel::BothOne};
  std::uint64_t total = 0, wrong = 0;
  for (unsigned cls = 0; cls < 3; ++cls) {
    for (double x : rep.samples.samples[cls]) {
      ++total;
      if (classify(x, rep.refs) != expected[cls]) ++wrong;
    }
  }
  rep.misclassified = wrong;
  rep.misclassification_rate = static_cast<double>(wrong) / static_cast<double>(total);
  return rep;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::string margin_report_json(const MarginReport& rep) {
  nlohmann::ordered_json j;
  j["spec"] = {{"tmr_ratio", fmt(rep.spec.tmr_ratio)},
               {"sigma_fraction", fmt(rep.spec.sigma_fraction)},
               {"n_samples", rep.spec.n_samples},
               {"seed", rep.spec.seed}};
  static const char* names[3] = {"pp", "ap_p", "ap_ap"};
  for (unsigned cls = 0; cls < 3; ++cls) {
    const auto& st = rep.samples.stats[cls];
    j["classes"][names[cls]] = {
        {"mean", fmt(st.mean)}, {"stddev", fmt(st.stddev)}, {"count", st.count}};
  }
  j["references"] = {{"i_ref_and", fmt(rep.refs.i_ref_and)}, {"i_ref_or", fmt(rep.refs.i_ref_or)}};
  j["margins"] = {{"and_boundary_sigma", fmt(rep.and_boundary.sigma_normalized)},
                  {"or_boundary_sigma", fmt(rep.or_boundary.sigma_normalized)}};
  j["misclassified"] = rep.misclassified;
  j["misclassification_rate"] = fmt(rep.misclassification_rate);
  return j.dump(2) + "\n";
}

std::string margin_histogram_csv(const MarginReport& rep) {
  constexpr double kLo = 0.0, kWidth = 0.005;
  constexpr int kBins = 600;  // covers [0, 3)
  std::array<std::array<std::uint32_t, 3>, kBins> counts{};
  for (unsigned cls = 0; cls < 3; ++cls) {
    for (double x : rep.samples.samples[cls]) {
      int bin = static_cast<int>((x - kLo) / kWidth);
      if (bin >= 0 && bin < kBins) ++counts[bin][cls];
    }
  }
  std::string out = "bin_low,bin_high,count_pp,count_ap_p,count_ap_ap\n";
  char line[128];
  for (int b = 0; b < kBins; ++b) {
    std::snprintf(line, sizeof(line), "%.3f,%.3f,%u,%u,%u\n", kLo + b * kWidth,
                  kLo + (b + 1) * kWidth, counts[b][0], counts[b][1], counts[b][2]);
    out += line;
  }
  return out;
}

}  // namespace himc
