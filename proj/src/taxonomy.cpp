#include "sfr/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "sfr/error.hpp"
#include "sfr/sfr.hpp"
#include "sfr/unicode.hpp"

namespace sfr {
namespace {

std::vector<std::u32string> whitespace_tokens(std::string_view text) {
  std::vector<std::u32string> tokens;
  std::u32string current;
  for (char32_t c : unicode::to_u32(text)) {
    if (unicode::is_whitespace(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::u32string join_ngram(const std::vector<std::u32string>& tokens, std::size_t start,
                          std::size_t n) {
  std::u32string key;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) key.push_back(U'\0');
    key += tokens[start + i];
  }
  return key;
}

}  // namespace

std::string_view to_string(Bucket bucket) {
  switch (bucket) {
    case Bucket::Latin: return "Latin";
    case Bucket::Devanagari: return "Devanagari";
    case Bucket::Target: return "Target";
    case Bucket::Other: return "Other";
  }
  return "Other";
}

LoopingScore detect_looping(std::string_view hypothesis, const LoopingOptions& opts) {
  const auto tokens = whitespace_tokens(hypothesis);
  LoopingScore result;
  if (tokens.empty()) return result;

  for (std::size_t n = 1; n <= opts.max_ngram && n <= tokens.size(); ++n) {
    struct Occurrences {
      std::size_t count = 0;
      std::size_t next_free = 0;  // first start index not overlapping the last counted one
    };
    std::unordered_map<std::u32string, Occurrences> seen;
    std::size_t best = 0;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      auto& occ = seen[join_ngram(tokens, i, n)];
      if (i >= occ.next_free) {
        ++occ.count;
        occ.next_free = i + n;
        best = std::max(best, occ.count);
      }
    }
    // Longer n-grams only count once they actually repeat.
    if (n > 1 && best < 2) continue;
    const double coverage =
        static_cast<double>(best * n) / static_cast<double>(tokens.size());
    result.score = std::max(result.score, coverage);
  }
  result.flag = result.score > opts.min_coverage && tokens.size() >= opts.min_tokens;
  return result;
}

TaxonomyLabel classify_dominant(const Utterance& u, const ScriptRegistry& registry,
                                const ScriptConfig& target_cfg, const TaxonomyOptions& opts) {
  TaxonomyLabel label;
  label.utterance_id = u.id;
  const auto looping = detect_looping(u.hypothesis, opts.looping);
  label.looping_score = looping.score;
  label.looping_flag = looping.flag;

  // Slot 0 is the target; 1..k follow the registry's detection order; last
  // slot collects unclassified characters.
  const auto& scripts = registry.detection_scripts;
  std::vector<std::size_t> counts(scripts.size() + 2, 0);
  const std::size_t unclassified = counts.size() - 1;
  std::size_t total = 0;
  for (char32_t c : countable_chars(u.hypothesis)) {
    ++total;
    if (char_in_script(c, target_cfg)) {
      ++counts[0];
      continue;
    }
    auto it = std::find_if(scripts.begin(), scripts.end(),
                           [c](const DetectionScript& s) { return s.contains(c); });
    ++counts[it == scripts.end() ? unclassified : 1 + static_cast<std::size_t>(it - scripts.begin())];
  }

  if (total == 0) {
    label.dominant_script = kNoScript;
    label.bucket = Bucket::Other;
    return label;
  }

  const auto top = std::max_element(counts.begin(), counts.end());  // first max wins ties
  const std::size_t slot = static_cast<std::size_t>(top - counts.begin());
  const double share = static_cast<double>(*top) / static_cast<double>(total);
  label.tie = std::count(counts.begin(), counts.end(), *top) > 1;

  if (share < opts.dominance) {
    label.dominant_script = kMixedScript;
    label.dominant_fraction = share;
    label.bucket = Bucket::Other;
    return label;
  }

  label.dominant_fraction = share;
  if (slot == 0) {
    label.dominant_script = target_cfg.script_name;
    label.bucket = Bucket::Target;
  } else if (slot == unclassified) {
    label.dominant_script = kUnclassified;
    label.bucket = Bucket::Other;
  } else {
    label.dominant_script = scripts[slot - 1].name;
    if (label.dominant_script == "Latin") {
      label.bucket = Bucket::Latin;
    } else if (label.dominant_script == "Devanagari") {
      label.bucket = Bucket::Devanagari;
    } else {
      label.bucket = Bucket::Other;
    }
  }
  return label;
}

std::vector<TaxonomyTable> taxonomy_table(std::span<const TaxonomyLabel> labels,
                                          const std::map<std::string, std::string>& grouping) {
  std::vector<TaxonomyTable> rows;
  std::map<std::string, std::size_t> row_of;
  for (const auto& label : labels) {
    auto g = grouping.find(label.utterance_id);
    if (g == grouping.end()) {
      throw InputError("utterance '" + label.utterance_id + "' has no group assignment");
    }
    auto [it, inserted] = row_of.try_emplace(g->second, rows.size());
    if (inserted) rows.push_back(TaxonomyTable{.group_id = g->second});
    auto& row = rows[it->second];
    ++row.counts[static_cast<std::size_t>(label.bucket)];
    ++row.n;
  }
  for (auto& row : rows) {
    for (std::size_t b = 0; b < kBucketCount; ++b) {
      row.percent[b] = static_cast<int>(
          round_half_away(100.0 * static_cast<double>(row.counts[b]) / static_cast<double>(row.n), 0));
    }
  }
  return rows;
}

}  // namespace sfr
