#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sfr/corpus_io.hpp"
#include "sfr/script_config.hpp"

namespace sfr {

struct ValidationCheck {
  std::string language_id;
  std::string kind;  // "positive", "negative" or "predictions"
  std::string subject;
  double expected = 0.0;
  std::optional<double> actual;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool passed() const;
  std::size_t failures() const;
};

struct KnownExamples {
  std::string language_id;
  std::vector<std::string> positives;  // expected SFR 1.0
  std::vector<std::string> negatives;  // expected SFR 0.0
};

// Embedded positive/negative strings for the six shipped languages.
std::vector<KnownExamples> builtin_known_examples();

ValidationReport validate_known_examples(const ScriptRegistry& registry,
                                         const std::vector<KnownExamples>& examples);

inline constexpr double kPredictionsSfrBound = 0.01;

// Whisper rows (model id starting with "whisper", any case) are grouped per
// model; each model's corpus mean SFR against `language_id` must fall below
// `bound`. A file without Whisper rows fails.
ValidationReport validate_predictions(const ScriptRegistry& registry,
                                      const std::vector<CorpusRecord>& records,
                                      std::string_view language_id = "ps",
                                      double bound = kPredictionsSfrBound);

}  // namespace sfr
