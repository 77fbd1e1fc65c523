#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sfr/script_config.hpp"
#include "sfr/utterance.hpp"

namespace sfr {

// Per-utterance Script Fidelity Rate. sfr is absent iff countable_chars == 0.
struct SfrResult {
  std::string utterance_id;
  std::size_t countable_chars = 0;
  std::size_t target_chars = 0;
  std::optional<double> sfr;

  bool operator==(const SfrResult&) const = default;
};

struct CorpusSfr {
  std::size_t utterance_count = 0;
  std::size_t null_count = 0;
  // Headline value: unweighted mean of non-null utterance values.
  std::optional<double> mean_sfr;
  // Sum of target chars over sum of countable chars.
  std::optional<double> weighted_sfr;
  std::vector<SfrResult> per_utterance;
};

// NFC-normalizes, then keeps every character that is not whitespace,
// punctuation (P*) or other (C*), in order.
std::u32string countable_chars(std::string_view hypothesis);
std::u32string countable_chars(std::u32string_view hypothesis);

// Scores the raw hypothesis; never pass WER-normalized text here.
SfrResult sfr_utterance(const Utterance& u, const ScriptConfig& cfg);
SfrResult sfr_text(std::string_view hypothesis, const ScriptConfig& cfg,
                   std::string utterance_id = {});

// Order-independent aggregation; per_utterance keeps input order.
CorpusSfr sfr_corpus(std::span<const SfrResult> results);

// Display rounding, half away from zero. Absorbs representation error so
// that 56.85 (stored as 56.8499...) rounds to 56.9.
double round_half_away(double value, int decimals);

// Percent with one decimal, half away from zero ("97.3"); "null" if absent.
std::string format_percent(std::optional<double> ratio);

}  // namespace sfr
