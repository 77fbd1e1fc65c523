#include <random>
#include <string>
#include <vector>

#include "doctest.h"

#include "oracles/edit_distance_oracle.hpp"
#include "sfr/error.hpp"
#include "sfr/eval_metrics.hpp"
#include "sfr/sfr.hpp"
#include "sfr/unicode.hpp"

using namespace sfr;

namespace {

const ScriptRegistry& registry() {
  static const ScriptRegistry reg = builtin_registry();
  return reg;
}

const NormalizationPolicy& policy(std::string_view lang) { return registry().at(lang).normalization; }

Utterance pair(std::string lang, std::string ref, std::string hyp) {
  return Utterance{.id = "t", .language_id = std::move(lang), .hypothesis = std::move(hyp), .reference = std::move(ref)};
}

std::vector<std::string> chars_as_tokens(const std::string& s) {
  std::vector<std::string> out;
  for (char c : s) out.emplace_back(1, c);
  return out;
}

EditStats token_stats(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
  return edit_distance_stats<std::string>(ref, hyp);
}

}  // namespace

TEST_CASE("normalization examples") {
  CHECK(normalize("Waa, Maxay?", policy("so")) == "waa maxay");
  CHECK(normalize("ب\u064Eاب\u0650", policy("ur")) == "باب");
  CHECK(normalize("ب\u064Eاب\u0650", policy("ps")) == "باب");
  CHECK(normalize("१२३ क।", policy("hi")) == "क");
  CHECK(normalize("১২ কখ।", policy("bn")) == "কখ");
  CHECK(normalize("൧ ക.", policy("ml")) == "ക");
  CHECK(normalize("  a \t\n b  ", policy("so")) == "a b");
  CHECK(normalize("", policy("so")).empty());
  // Arabic-Indic digits are not stripped for Arabic-script languages.
  CHECK(normalize("١٢", policy("ur")) == "١٢");
  // ASCII digits survive Indic normalization.
  CHECK(normalize("12 क", policy("hi")) == "12 क");
  // ZWNJ is Cf, not punctuation: kept inside the token.
  CHECK(normalize("می\u200Cخوام", policy("ur")) ==
        "می\u200Cخوام");
}

TEST_CASE("property: normalization is idempotent for every policy") {
  const std::vector<std::string> pool = {
      "A", "b", "Z", "É", "e\u0301", "İ", "Σ", "ß", " ", "\t", "  ", ",", ".", "?",
      "ب", "\u064E", "\u0650", "\u0651", "\u0670", "\u06D6", "،", "۔",
      "क", "\u093C", "०", "१", "।", "ক", "\u09BC", "০", "ക", "൦",
      "\u200C", "\u200B", "1", "-", "\u00A0"};
  std::mt19937 rng(31337);
  for (const char* lang : {"ps", "ur", "hi", "bn", "ml", "so"}) {
    const auto& p = policy(lang);
    for (int i = 0; i < 1000; ++i) {
      std::string s;
      const std::size_t len = rng() % 20;
      for (std::size_t k = 0; k < len; ++k) s += pool[rng() % pool.size()];
      const auto once = normalize(s, p);
      REQUIRE_MESSAGE(normalize(once, p) == once, lang << " input: " << s);
    }
  }
}

TEST_CASE("edit distance examples") {
  const auto sub = token_stats({"a", "b", "c"}, {"a", "x", "c"});
  CHECK(sub == EditStats{1, 0, 0, 3});
  CHECK(sub.rate() == doctest::Approx(1.0 / 3.0));

  const auto ins = token_stats({"a"}, {"a", "a", "a", "a", "a"});
  CHECK(ins == EditStats{0, 0, 4, 1});
  CHECK(ins.rate() == doctest::Approx(4.0));

  const auto del = token_stats({"a", "b"}, {});
  CHECK(del == EditStats{0, 2, 0, 2});
  CHECK(del.rate() == doctest::Approx(1.0));

  CHECK_THROWS_AS(token_stats({}, {"a"}), InputError);

  // A substitution beats a deletion+insertion pair of the same position.
  CHECK(token_stats({"a"}, {"b"}) == EditStats{1, 0, 0, 1});
  // Tie between sub+del and del+sub: substitution is preferred first in the backtrace.
  CHECK(token_stats({"a", "b"}, {"c"}).errors() == 2);
}

TEST_CASE("edit distance agrees with the shortest-path oracle") {
  const sfr::oracle::EditGraph graph("abc", 4);
  for (const auto& ref : graph.nodes()) {
    if (ref.empty()) continue;
    const auto dist = graph.distances_from(ref);
    for (const auto& hyp : graph.nodes()) {
      const auto stats = token_stats(chars_as_tokens(ref), chars_as_tokens(hyp));
      REQUIRE(static_cast<int>(stats.errors()) == dist[graph.index_of(hyp)]);
      // Any alignment balances lengths this way.
      REQUIRE(static_cast<long>(ref.size()) - static_cast<long>(stats.deletions) +
                  static_cast<long>(stats.insertions) ==
              static_cast<long>(hyp.size()));
      REQUIRE(stats.reference_len == ref.size());
    }
  }
}

TEST_CASE("character-level stats use code points") {
  const std::u32string ref = U"কখ";
  const std::u32string hyp = U"কগঘ";
  const auto stats = edit_distance_stats<char32_t>(ref, hyp);
  CHECK(stats.errors() == 2);
  CHECK(stats.reference_len == 2);
}

TEST_CASE("wer and cer") {
  CHECK(wer(pair("so", "waa maxay", "waa maxay"), policy("so")) == 0.0);
  CHECK(wer(pair("so", "waa", "waa waa waa waa waa"), policy("so")) == doctest::Approx(4.0));
  CHECK(wer(pair("so", "Waa, maxay?", "waa maxay"), policy("so")) == 0.0);
  CHECK(wer(pair("so", "a b c", "a x c"), policy("so")) == doctest::Approx(1.0 / 3.0));

  // Inter-word spaces count as characters: "ab cd" vs "abcd" is one deletion of five.
  CHECK(cer(pair("so", "ab cd", "abcd"), policy("so")) == doctest::Approx(1.0 / 5.0));
  // Repeating a two-letter word adds " ab": three insertions over two characters.
  CHECK(cer(pair("so", "ab", "ab ab"), policy("so")) == doctest::Approx(3.0 / 2.0));
  CHECK(cer(pair("hi", "कख", "कख"), policy("hi")) == 0.0);
}

TEST_CASE("wer errors") {
  Utterance missing{.id = "no-ref", .language_id = "so", .hypothesis = "waa"};
  CHECK_THROWS_AS(wer(missing, policy("so")), InputError);
  CHECK_THROWS_AS(cer(missing, policy("so")), InputError);
  try {
    wer(Utterance{.id = "only-punct", .language_id = "so", .hypothesis = "x", .reference = "?!"}, policy("so"));
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("only-punct") != std::string::npos);
  }
}

TEST_CASE("WER is blind to the script of the substituted tokens") {
  const std::string ref = "আম\u09BF ভ\u09BEত খ\u09BEই";
  const std::string devanagari = "म\u0948\u0902 च\u093Eवल ख\u093Eत\u093E";
  const std::string wrong_bengali = "ত\u09C1ম\u09BF জল প\u09BEন";
  const auto& bn = registry().at("bn");
  const double w1 = wer(pair("bn", ref, devanagari), bn.normalization);
  const double w2 = wer(pair("bn", ref, wrong_bengali), bn.normalization);
  CHECK(w1 == doctest::Approx(w2));
  const auto s1 = sfr_text(devanagari, bn);
  const auto s2 = sfr_text(wrong_bengali, bn);
  REQUIRE(s1.sfr);
  REQUIRE(s2.sfr);
  CHECK(*s2.sfr - *s1.sfr > 0.9);
}

TEST_CASE("stats accumulate") {
  EditStats a{1, 2, 3, 10};
  a += EditStats{1, 0, 0, 5};
  CHECK(a == EditStats{2, 2, 3, 15});
  CHECK(a.rate() == doctest::Approx(7.0 / 15.0));
}
