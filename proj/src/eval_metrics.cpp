#include "sfr/eval_metrics.hpp"

#include <algorithm>
#include <cstdint>

#include "sfr/error.hpp"
#include "sfr/unicode.hpp"

namespace sfr {
namespace {

bool in_any(char32_t c, const std::vector<CodePointRange>& ranges) {
  return std::any_of(ranges.begin(), ranges.end(),
                     [c](const CodePointRange& r) { return r.contains(c); });
}

const std::string& require_reference(const Utterance& u) {
  if (!u.reference) throw InputError("utterance '" + u.id + "' has no reference");
  return *u.reference;
}

}  // namespace

std::string normalize(std::string_view text, const NormalizationPolicy& policy) {
  std::u32string s = unicode::nfc(unicode::to_u32(text));
  if (policy.kind == NormalizationKind::LatinLowercase) s = unicode::to_lower(s);

  std::u32string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char32_t c : s) {
    if (unicode::is_whitespace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (unicode::is_punctuation(c)) continue;
    if (policy.kind == NormalizationKind::ArabicScript && in_any(c, policy.diacritic_ranges)) continue;
    if (policy.kind == NormalizationKind::Indic && in_any(c, policy.digit_ranges)) continue;
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(c);
  }
  return unicode::to_utf8(unicode::nfc(out));
}

EditStats& EditStats::operator+=(const EditStats& other) {
  substitutions += other.substitutions;
  deletions += other.deletions;
  insertions += other.insertions;
  reference_len += other.reference_len;
  return *this;
}

template <typename Token>
EditStats edit_distance_stats(std::span<const Token> reference, std::span<const Token> hypothesis) {
  if (reference.empty()) throw InputError("empty reference: error rate is undefined");
  const std::size_t rows = reference.size() + 1;
  const std::size_t cols = hypothesis.size() + 1;
  std::vector<std::uint32_t> cost(rows * cols);
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return cost[i * cols + j]; };

  for (std::size_t i = 0; i < rows; ++i) at(i, 0) = static_cast<std::uint32_t>(i);
  for (std::size_t j = 0; j < cols; ++j) at(0, j) = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i < rows; ++i) {
    for (std::size_t j = 1; j < cols; ++j) {
      const std::uint32_t diag = at(i - 1, j - 1) + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  EditStats stats;
  stats.reference_len = reference.size();
  std::size_t i = reference.size();
  std::size_t j = hypothesis.size();
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool match = reference[i - 1] == hypothesis[j - 1];
      if (at(i, j) == at(i - 1, j - 1) + (match ? 0 : 1)) {
        if (!match) ++stats.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++stats.deletions;
      --i;
    } else {
      ++stats.insertions;
      --j;
    }
  }
  return stats;
}

template EditStats edit_distance_stats<std::string>(std::span<const std::string>,
                                                    std::span<const std::string>);
template EditStats edit_distance_stats<char32_t>(std::span<const char32_t>,
                                                 std::span<const char32_t>);

std::vector<std::string> whitespace_tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::u32string current;
  for (char32_t c : unicode::to_u32(text)) {
    if (unicode::is_whitespace(c)) {
      if (!current.empty()) tokens.push_back(unicode::to_utf8(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) tokens.push_back(unicode::to_utf8(current));
  return tokens;
}

EditStats word_edit_stats(const Utterance& u, const NormalizationPolicy& policy) {
  const auto ref = whitespace_tokenize(normalize(require_reference(u), policy));
  if (ref.empty()) {
    throw InputError("utterance '" + u.id + "': reference is empty after normalization");
  }
  const auto hyp = whitespace_tokenize(normalize(u.hypothesis, policy));
  return edit_distance_stats<std::string>(ref, hyp);
}

EditStats char_edit_stats(const Utterance& u, const NormalizationPolicy& policy) {
  const auto ref = unicode::to_u32(normalize(require_reference(u), policy));
  if (ref.empty()) {
    throw InputError("utterance '" + u.id + "': reference is empty after normalization");
  }
  const auto hyp = unicode::to_u32(normalize(u.hypothesis, policy));
  return edit_distance_stats<char32_t>(ref, hyp);
}

double wer(const Utterance& u, const NormalizationPolicy& policy) {
  return word_edit_stats(u, policy).rate();
}

double cer(const Utterance& u, const NormalizationPolicy& policy) {
  return char_edit_stats(u, policy).rate();
}

}  // namespace sfr
