#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sfr/script_config.hpp"
#include "sfr/utterance.hpp"

namespace sfr {

// Language-specific normalization for WER/CER:
//   ArabicScript   - drop diacritic_ranges and P*
//   Indic          - drop P* and digit_ranges
//   LatinLowercase - lowercase, then drop P*
// All policies then collapse whitespace runs to one space and trim. NFC is
// applied on entry and exit so the result is a fixed point.
std::string normalize(std::string_view text, const NormalizationPolicy& policy);

struct EditStats {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t reference_len = 0;

  std::size_t errors() const { return substitutions + deletions + insertions; }
  // May exceed 1.0 when the hypothesis inserts heavily.
  double rate() const { return static_cast<double>(errors()) / static_cast<double>(reference_len); }

  EditStats& operator+=(const EditStats& other);
  bool operator==(const EditStats&) const = default;
};

// Minimal-cost Levenshtein alignment. On cost ties the backtrace prefers
// substitution, then deletion, then insertion. Throws InputError if the
// reference is empty.
template <typename Token>
EditStats edit_distance_stats(std::span<const Token> reference, std::span<const Token> hypothesis);

extern template EditStats edit_distance_stats<std::string>(std::span<const std::string>,
                                                           std::span<const std::string>);
extern template EditStats edit_distance_stats<char32_t>(std::span<const char32_t>,
                                                        std::span<const char32_t>);

std::vector<std::string> whitespace_tokenize(std::string_view text);

// Word-level stats after normalizing both sides. Throws InputError when the
// reference is missing or normalizes to nothing.
EditStats word_edit_stats(const Utterance& u, const NormalizationPolicy& policy);
// Character-level stats over normalized text, inter-word spaces included.
EditStats char_edit_stats(const Utterance& u, const NormalizationPolicy& policy);

double wer(const Utterance& u, const NormalizationPolicy& policy);
double cer(const Utterance& u, const NormalizationPolicy& policy);

}  // namespace sfr
