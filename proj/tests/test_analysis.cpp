#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"

#include "oracles/wilson_oracle.hpp"
#include "sfr/analysis.hpp"
#include "sfr/corpus_io.hpp"
#include "sfr/error.hpp"
#include "sfr/sfr.hpp"

using namespace sfr;

namespace {

const EvalMatrix& fixture() {
  static const EvalMatrix m = builtin_results_matrix();
  return m;
}

EvalCell cell(std::string model, std::string lang, double sfr, double wer) {
  return EvalCell{.model_id = std::move(model), .language_id = std::move(lang), .sfr_percent = sfr,
                  .wer_percent = wer, .evaluated = true};
}

std::set<std::pair<std::string, std::string>> as_set(const CollapseReport& r) {
  return {r.collapsed_pairs.begin(), r.collapsed_pairs.end()};
}

const FamilySummaryRow& row(const std::vector<FamilySummaryRow>& rows, std::string_view family) {
  auto it = std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.family == family; });
  REQUIRE(it != rows.end());
  return *it;
}

}  // namespace

TEST_CASE("collapse on the results fixture") {
  const auto r = classify_collapse(fixture());
  CHECK(r.n_evaluated == 53);
  CHECK(r.collapsed_pairs.size() == 18);
  for (const auto& [model, lang] : r.collapsed_pairs) {
    CHECK(default_family_of(model) == "Whisper");
    CHECK(*fixture().find(model, lang)->sfr_percent < 10.0);
  }
  CHECK(r.proportion == doctest::Approx(18.0 / 53.0));
  REQUIRE(r.gap);
  CHECK(r.gap->first == doctest::Approx(7.2));
  CHECK(r.gap->second == doctest::Approx(13.0));
  REQUIRE(r.insensitive_interval);
  CHECK(round_half_away(r.gap->second - r.gap->first, 1) == doctest::Approx(5.8));
  CHECK(r.bimodality.below == 18);
  CHECK(r.bimodality.intermediate == 5);
  CHECK(r.bimodality.above == 30);
}

TEST_CASE("collapsed set is stable across the gap") {
  const auto base = as_set(classify_collapse(fixture()));
  for (double t : {7.3, 8.0, 9.0, 10.0, 11.0, 12.0, 12.9}) {
    CHECK(as_set(classify_collapse(fixture(), t)) == base);
  }
  CHECK(as_set(classify_collapse(fixture(), 7.1)).size() == 17);
  CHECK(as_set(classify_collapse(fixture(), 13.1)).size() == 19);
}

TEST_CASE("collapse errors and degenerate cases") {
  EvalMatrix empty;
  CHECK_THROWS_AS(classify_collapse(empty), InputError);
  CHECK_THROWS_AS(classify_collapse(fixture(), 0.0), InputError);
  CHECK_THROWS_AS(classify_collapse(fixture(), 100.0), InputError);

  EvalMatrix all_good;
  all_good.add(cell("m", "a", 99.0, 10.0));
  const auto r = classify_collapse(all_good);
  CHECK(r.collapsed_pairs.empty());
  CHECK_FALSE(r.gap);
  CHECK_FALSE(r.insensitive_interval);
}

TEST_CASE("matrix rejects duplicates and inconsistent cells") {
  EvalMatrix m;
  m.add(cell("m", "a", 1.0, 2.0));
  CHECK_THROWS_AS(m.add(cell("m", "a", 3.0, 4.0)), InputError);
  CHECK_THROWS_AS(m.add(EvalCell{.model_id = "m", .language_id = "b", .sfr_percent = 1.0}), InputError);
  CHECK(fixture().cells().size() == 54);
  CHECK(fixture().evaluated_count() == 53);
  const auto* na = fixture().find("mms-1b", "ur");
  REQUIRE(na);
  CHECK_FALSE(na->evaluated);
}

TEST_CASE("Wilson interval") {
  const auto [lo, hi] = wilson_ci(18, 53);
  CHECK(std::abs(lo - 0.227) <= 0.005);
  CHECK(std::abs(hi - 0.474) <= 0.005);
  CHECK(round_half_away(100 * lo, 0) == 23);
  CHECK(round_half_away(100 * hi, 0) == 47);
  const auto oracle = sfr::oracle::wilson_closed_form(18, 53, sfr::oracle::kZ95);
  CHECK(lo == doctest::Approx(oracle.first).epsilon(1e-12));
  CHECK(hi == doctest::Approx(oracle.second).epsilon(1e-12));

  CHECK(wilson_ci(0, 10).first == 0.0);
  CHECK(wilson_ci(10, 10).second == 1.0);

  const auto five = wilson_ci(5, 10);
  const auto five_oracle = sfr::oracle::wilson_closed_form(5, 10, sfr::oracle::kZ95);
  CHECK(five.first == doctest::Approx(five_oracle.first).epsilon(1e-12));
  CHECK(five.second == doctest::Approx(five_oracle.second).epsilon(1e-12));
  CHECK(five.first + five.second == doctest::Approx(1.0));

  CHECK(normal_quantile_two_sided(0.95) == doctest::Approx(sfr::oracle::kZ95).epsilon(1e-12));
  CHECK_THROWS_AS(wilson_ci(0, 0), InputError);
  CHECK_THROWS_AS(wilson_ci(3, 2), InputError);
}

TEST_CASE("property: Wilson interval bounds") {
  std::mt19937 rng(4);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t n = 1 + rng() % 200;
    const std::size_t k = rng() % (n + 1);
    const auto [lo, hi] = wilson_ci(k, n);
    const double p = static_cast<double>(k) / static_cast<double>(n);
    REQUIRE(lo >= 0.0);
    REQUIRE(hi <= 1.0);
    REQUIRE(lo <= p + 1e-12);
    REQUIRE(hi >= p - 1e-12);
    if (n <= 30 && p >= 0.2 && p <= 0.8) {
      const double z = sfr::oracle::kZ95;
      const double wald_half = z * std::sqrt(p * (1 - p) / static_cast<double>(n));
      REQUIRE(hi - lo < 2 * wald_half);
    }
  }
}

TEST_CASE("median") {
  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 3, 2}) == doctest::Approx(2.5));
  CHECK_THROWS_AS(median({}), InputError);
}

TEST_CASE("family summary on the fixture") {
  const auto rows = family_summary(fixture(), [](std::string_view id) -> std::optional<std::string> {
    return default_family_of(id);
  });
  REQUIRE(rows.size() == 4);
  CHECK(rows.back().family == kAllModelsFamily);

  const auto& whisper = row(rows, "Whisper");
  CHECK(whisper.collapsed == 18);
  CHECK(whisper.evaluated == 42);
  // Recomputed from the 42 cells: 2139.1 / 42.
  CHECK(round_half_away(*whisper.mean_sfr, 1) == doctest::Approx(50.9));
  CHECK(round_half_away(*whisper.median_sfr, 1) == doctest::Approx(56.9));

  const auto& mms = row(rows, "MMS-1B");
  CHECK(mms.evaluated == 5);
  CHECK(mms.collapsed == 0);
  CHECK(round_half_away(*mms.mean_sfr, 1) == doctest::Approx(99.3));
  CHECK(round_half_away(*mms.median_sfr, 1) == doctest::Approx(99.4));

  const auto& seamless = row(rows, "SeamlessM4T-v2");
  CHECK(seamless.evaluated == 6);
  CHECK(round_half_away(*seamless.mean_sfr, 1) == doctest::Approx(99.9));
  CHECK(round_half_away(*seamless.median_sfr, 1) == doctest::Approx(100.0));

  const auto& all = row(rows, kAllModelsFamily);
  CHECK(all.evaluated == 53);
  CHECK(all.collapsed == 18);
  CHECK(round_half_away(*all.mean_sfr, 1) == doctest::Approx(61.0));
  CHECK(round_half_away(*all.median_sfr, 1) == doctest::Approx(97.3));
}

TEST_CASE("family summary by explicit map") {
  EvalMatrix m;
  m.add(cell("solo", "x", 100.0, 5.0));
  const auto rows = family_summary(m, std::map<std::string, std::string>{{"solo", "Solo"}});
  const auto& solo = row(rows, "Solo");
  CHECK(*solo.mean_sfr == 100.0);
  CHECK(*solo.median_sfr == 100.0);
  CHECK(solo.collapsed == 0);
  CHECK(solo.evaluated == 1);
  CHECK_THROWS_AS(family_summary(m, std::map<std::string, std::string>{}), InputError);
}

TEST_CASE("default families") {
  CHECK(default_family_of("whisper-tiny") == "Whisper");
  CHECK(default_family_of("mms-1b") == "MMS-1B");
  CHECK(default_family_of("seamlessm4t-v2") == "SeamlessM4T-v2");
  CHECK(default_family_of("other") == "other");
}

TEST_CASE("scatter data") {
  const auto records = scatter_data(fixture());
  CHECK(records.size() == 53);
  auto it = std::find_if(records.begin(), records.end(), [](const auto& r) {
    return r.model_id == "whisper-large-v2" && r.language_id == "bn";
  });
  REQUIRE(it != records.end());
  CHECK(*it->wer_percent == doctest::Approx(113.3));
  CHECK(it->sfr_percent == doctest::Approx(0.7));
  CHECK(it->collapsed);
  CHECK(it->quadrant == Quadrant::HighWerLowSfr);

  CHECK(scatter_data(EvalMatrix{}).empty());

  const auto csv = scatter_csv(records);
  CHECK(csv.rfind("model,language,wer,sfr,collapsed,quadrant\n", 0) == 0);
  CHECK(csv.find("whisper-large-v2,bn,113.3,0.7,true,high-wer/low-sfr\n") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 54);
}

TEST_CASE("quadrants") {
  CHECK(classify_quadrant(10, 99) == Quadrant::LowWerHighSfr);
  CHECK(classify_quadrant(150, 0) == Quadrant::HighWerLowSfr);
  CHECK(classify_quadrant(458, 99.2) == Quadrant::HighWerHighSfr);
  CHECK(classify_quadrant(5, 2) == Quadrant::LowWerLowSfr);
  CHECK(classify_quadrant(40, 10) == Quadrant::HighWerHighSfr);
  CHECK(to_string(Quadrant::LowWerHighSfr) == "low-wer/high-sfr");
}

TEST_CASE("gated report") {
  const auto g = gated_report(fixture());
  CHECK(g.flagged_wer_count == 22);
  CHECK(g.collapsed_count == 18);
  CHECK(g.cells.size() == 54);

  // Eight fixture cells are exactly 0.0, below any positive gate.
  CHECK(gated_report(fixture(), 0.0001).flagged_wer_count == 8);

  EvalMatrix no_zero;
  no_zero.add(cell("m", "a", 0.5, 200.0));
  no_zero.add(cell("m", "b", 95.0, 20.0));
  no_zero.add(EvalCell{.model_id = "m", .language_id = "c"});
  CHECK(gated_report(no_zero, 0.0001).flagged_wer_count == 0);

  EvalMatrix perfect;
  for (const char* lang : {"a", "b", "c"}) perfect.add(cell("m", lang, 100.0, 30.0));
  CHECK(gated_report(perfect).flagged_wer_count == 0);

  CHECK_THROWS_AS(gated_report(fixture(), 0.0), InputError);
  CHECK_THROWS_AS(gated_report(fixture(), 1.0), InputError);

  const auto text = render_gated_text(fixture(), g);
  CHECK(text.find("*0.7*") != std::string::npos);
  CHECK(text.find("[113.3]") != std::string::npos);
  CHECK(text.find("---") != std::string::npos);
}
