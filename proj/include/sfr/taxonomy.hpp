#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sfr/script_config.hpp"
#include "sfr/utterance.hpp"

namespace sfr {

// Column scheme of the dominant-script table.
enum class Bucket { Latin = 0, Devanagari = 1, Target = 2, Other = 3 };
inline constexpr std::size_t kBucketCount = 4;

std::string_view to_string(Bucket bucket);

inline constexpr std::string_view kMixedScript = "mixed";
inline constexpr std::string_view kNoScript = "none";
inline constexpr std::string_view kUnclassified = "unclassified";

struct LoopingOptions {
  std::size_t max_ngram = 5;
  double min_coverage = 0.5;  // flag requires score strictly above this
  std::size_t min_tokens = 10;
};

struct TaxonomyOptions {
  double dominance = 0.5;
  LoopingOptions looping;
};

struct LoopingScore {
  double score = 0.0;
  bool flag = false;
};

struct TaxonomyLabel {
  std::string utterance_id;
  std::string dominant_script;  // script name, "mixed" or "none"
  std::optional<double> dominant_fraction;
  bool tie = false;  // dominant script shared the top count with another
  Bucket bucket = Bucket::Other;
  bool looping_flag = false;
  double looping_score = 0.0;
};

struct TaxonomyTable {
  std::string group_id;
  std::array<std::size_t, kBucketCount> counts{};
  std::array<int, kBucketCount> percent{};  // each rounded independently
  std::size_t n = 0;
};

// Whitespace-tokenized repetition detector. For each n-gram length the
// most frequent n-gram is found by greedy non-overlapping count; the score
// is the largest fraction of tokens covered by those repetitions. For n > 1
// an n-gram must occur at least twice to count.
LoopingScore detect_looping(std::string_view hypothesis, const LoopingOptions& opts = {});

TaxonomyLabel classify_dominant(const Utterance& u, const ScriptRegistry& registry,
                                const ScriptConfig& target_cfg,
                                const TaxonomyOptions& opts = {});

// One row per group, in first-appearance order. Throws InputError when a
// label's utterance is missing from grouping.
std::vector<TaxonomyTable> taxonomy_table(std::span<const TaxonomyLabel> labels,
                                          const std::map<std::string, std::string>& grouping);

}  // namespace sfr
