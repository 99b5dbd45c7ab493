#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "himc/margins.hpp"

using namespace himc;

TEST_CASE("zero variation collapses every class onto its analytic mean") {
  VariationSpec spec{.tmr_ratio = 1.5, .sigma_fraction = 0.0, .n_samples = 64, .seed = 3};
  auto samples = sample_currents(spec);
  for (double x : samples.samples[0]) CHECK(x == doctest::Approx(2.0).epsilon(1e-12));
  for (double x : samples.samples[1]) CHECK(x == doctest::Approx(1.4).epsilon(1e-12));
  for (double x : samples.samples[2]) CHECK(x == doctest::Approx(0.8).epsilon(1e-12));

  auto refs = choose_references(samples);
  CHECK(refs.i_ref_or == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(refs.i_ref_and == doctest::Approx(1.1).epsilon(1e-12));

  auto rep = margin_report(spec);
  CHECK(rep.misclassified == 0);
}

TEST_CASE("classification against midpoint references") {
  References refs{.i_ref_and = 1.1, .i_ref_or = 1.7};
  CHECK(classify(0.8, refs) == SenseLevel::BothOne);
  CHECK(classify(1.4, refs) == SenseLevel::Mixed);
  CHECK(classify(2.0, refs) == SenseLevel::BothZero);
}

TEST_CASE("10k-sample study at TMR 150% and 5% variation") {
  VariationSpec spec{.tmr_ratio = 1.5, .sigma_fraction = 0.05, .n_samples = 10000, .seed = 42};
  auto rep = margin_report(spec);

  // Class means stay within 1% of the analytic 1/R sums.
  CHECK(std::abs(rep.samples.stats[0].mean - 2.0) < 0.02);
  CHECK(std::abs(rep.samples.stats[1].mean - 1.4) < 0.014);
  CHECK(std::abs(rep.samples.stats[2].mean - 0.8) < 0.008);

  // The P-P class spreads more, pulling the equal-error point below 1.7.
  CHECK(rep.refs.i_ref_or < 1.7);
  CHECK(rep.refs.i_ref_and < rep.refs.i_ref_or);

  // The AP-P / P-P margin is the tight one.
  CHECK(rep.or_boundary.sigma_normalized < rep.and_boundary.sigma_normalized);
  CHECK(rep.misclassification_rate < 1e-3);
}

TEST_CASE("identical specs give bit-identical sample arrays") {
  VariationSpec spec{.tmr_ratio = 1.5, .sigma_fraction = 0.05, .n_samples = 2000, .seed = 9};
  auto a = sample_currents(spec);
  auto b = sample_currents(spec);
  for (unsigned cls = 0; cls < 3; ++cls) {
    REQUIRE(a.samples[cls].size() == b.samples[cls].size());
    for (std::size_t i = 0; i < a.samples[cls].size(); ++i)
      CHECK(a.samples[cls][i] == b.samples[cls][i]);
  }
}

TEST_CASE("mean ordering holds across shipped seeds and tmr values") {
  for (std::uint64_t seed : {1ull, 7ull, 1234ull}) {
    for (double tmr : {0.5, 1.24, 1.5, 2.0}) {
      VariationSpec spec{.tmr_ratio = tmr, .sigma_fraction = 0.08, .n_samples = 1000,
                         .seed = seed};
      auto s = sample_currents(spec);
      CHECK(s.stats[0].mean > s.stats[1].mean);
      CHECK(s.stats[1].mean > s.stats[2].mean);
    }
  }
}

TEST_CASE("raising the TMR ratio widens both margins") {
  double prev_and = 0.0, prev_or = 0.0;
  for (double tmr : {1.24, 1.5, 2.0}) {
    VariationSpec spec{.tmr_ratio = tmr, .sigma_fraction = 0.05, .n_samples = 10000, .seed = 42};
    auto rep = margin_report(spec);
    CHECK(rep.and_boundary.sigma_normalized > prev_and);
    CHECK(rep.or_boundary.sigma_normalized > prev_or);
    prev_and = rep.and_boundary.sigma_normalized;
    prev_or = rep.or_boundary.sigma_normalized;
  }
}

TEST_CASE("the high-current class carries the larger absolute spread") {
  VariationSpec spec{.tmr_ratio = 1.5, .sigma_fraction = 0.03, .n_samples = 5000, .seed = 11};
  auto s = sample_currents(spec);
  CHECK(s.stats[0].stddev > s.stats[2].stddev);
}

TEST_CASE("invalid variation specs are rejected") {
  CHECK_THROWS(sample_currents({.tmr_ratio = 0.0, .sigma_fraction = 0.05, .n_samples = 10,
                                .seed = 1}));
  CHECK_THROWS(sample_currents({.tmr_ratio = 1.5, .sigma_fraction = 0.5, .n_samples = 10,
                                .seed = 1}));
  CHECK_THROWS(sample_currents({.tmr_ratio = 1.5, .sigma_fraction = 0.05, .n_samples = 0,
                                .seed = 1}));
}

TEST_CASE("report serializers are stable and well formed") {
  VariationSpec spec{.tmr_ratio = 1.5, .sigma_fraction = 0.05, .n_samples = 500, .seed = 5};
  auto rep = margin_report(spec);
  auto j1 = margin_report_json(rep);
  auto j2 = margin_report_json(margin_report(spec));
  CHECK(j1 == j2);
  auto csv = margin_histogram_csv(rep);
  CHECK(csv.rfind("bin_low,bin_high", 0) == 0);
  CHECK(csv.find("\n") != std::string::npos);
}
