#include "sfr/sfr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sfr/unicode.hpp"

namespace sfr {

std::u32string countable_chars(std::u32string_view hypothesis) {
  const std::u32string normalized = unicode::nfc(hypothesis);
  std::u32string out;
  out.reserve(normalized.size());
  for (char32_t c : normalized) {
    if (unicode::is_whitespace(c) || unicode::is_punctuation(c) || unicode::is_other(c)) continue;
    out.push_back(c);
  }
  return out;
}

std::u32string countable_chars(std::string_view hypothesis) {
  return countable_chars(unicode::to_u32(hypothesis));
}

SfrResult sfr_text(std::string_view hypothesis, const ScriptConfig& cfg,
                   std::string utterance_id) {
  SfrResult r;
  r.utterance_id = std::move(utterance_id);
  for (char32_t c : countable_chars(hypothesis)) {
    ++r.countable_chars;
    if (char_in_script(c, cfg)) ++r.target_chars;
  }
  if (r.countable_chars > 0) {
    r.sfr = static_cast<double>(r.target_chars) / static_cast<double>(r.countable_chars);
  }
  return r;
}

SfrResult sfr_utterance(const Utterance& u, const ScriptConfig& cfg) {
  return sfr_text(u.hypothesis, cfg, u.id);
}

CorpusSfr sfr_corpus(std::span<const SfrResult> results) {
  CorpusSfr corpus;
  corpus.utterance_count = results.size();
  corpus.per_utterance.assign(results.begin(), results.end());

  double sum = 0.0;
  std::size_t present = 0;
  std::size_t target_total = 0;
  std::size_t countable_total = 0;
  for (const auto& r : results) {
    target_total += r.target_chars;
    countable_total += r.countable_chars;
    if (r.sfr) {
      sum += *r.sfr;
      ++present;
    } else {
      ++corpus.null_count;
    }
  }
  if (present > 0) {
    corpus.mean_sfr = sum / static_cast<double>(present);
    corpus.weighted_sfr =
        static_cast<double>(target_total) / static_cast<double>(countable_total);
  }
  return corpus;
}

double round_half_away(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double scaled = value * scale;
  return std::round(scaled + std::copysign(1e-9 * std::max(1.0, std::fabs(scaled)), scaled)) /
         scale;
}

std::string format_percent(std::optional<double> ratio) {
  if (!ratio) return "null";
  const double rounded = round_half_away(*ratio * 100.0, 1);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", rounded == 0.0 ? 0.0 : rounded);
  return buf;
}

}  // namespace sfr
