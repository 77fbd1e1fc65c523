#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sfr {

struct CodePointRange {
  char32_t start = 0;
  char32_t end = 0;

  bool contains(char32_t c) const { return c >= start && c <= end; }
  bool overlaps(const CodePointRange& other) const {
    return start <= other.end && other.start <= end;
  }
  auto operator<=>(const CodePointRange&) const = default;
};

// Throws ValidationError unless start <= end <= U+10FFFF.
CodePointRange make_range(char32_t start, char32_t end);

// Parses "0600-06FF" (or a single "0670"). Throws ConfigError.
CodePointRange parse_range(std::string_view text);
std::string format_range(const CodePointRange& r);

enum class NormalizationKind { ArabicScript, Indic, LatinLowercase };

std::string_view to_string(NormalizationKind kind);
NormalizationKind parse_normalization_kind(std::string_view name);

// Text normalization applied before WER/CER. Which range list is consulted
// depends on kind: diacritics for ArabicScript, digits for Indic.
struct NormalizationPolicy {
  NormalizationKind kind = NormalizationKind::LatinLowercase;
  std::vector<CodePointRange> diacritic_ranges;
  std::vector<CodePointRange> digit_ranges;

  static NormalizationPolicy defaults_for(NormalizationKind kind);
  bool operator==(const NormalizationPolicy&) const = default;
};

struct ScriptConfig {
  std::string language_id;
  std::string script_name;
  std::vector<CodePointRange> ranges;
  std::set<char32_t> unique_points;
  NormalizationPolicy normalization;

  bool operator==(const ScriptConfig&) const = default;
};

// Throws ValidationError on empty/overlapping ranges or invalid points.
void validate(const ScriptConfig& cfg);

bool char_in_script(char32_t c, const ScriptConfig& cfg);

struct DetectionScript {
  std::string name;
  std::vector<CodePointRange> ranges;

  bool contains(char32_t c) const;
  bool operator==(const DetectionScript&) const = default;
};

struct ScriptRegistry {
  std::map<std::string, ScriptConfig, std::less<>> configs;
  // Fixed order; earlier entries win ties in dominant-script classification.
  std::vector<DetectionScript> detection_scripts;

  const ScriptConfig* find(std::string_view language_id) const;
  // Throws InputError listing the known languages.
  const ScriptConfig& at(std::string_view language_id) const;
  std::vector<std::string> language_ids() const;

  bool operator==(const ScriptRegistry&) const = default;
};

// Latin, Devanagari, Bengali, Malayalam, Arabic, Cyrillic, in that order.
std::vector<DetectionScript> default_detection_scripts();

// The six shipped language configs plus default detection scripts.
ScriptRegistry builtin_registry();

// Parses the scripts file format. Throws ConfigError (with line/key) or
// ValidationError.
std::vector<ScriptConfig> parse_script_configs(std::string_view text);
std::string serialize_script_configs(const ScriptRegistry& registry);

// Merges file entries over the built-ins; same language_id replaces.
ScriptRegistry load_registry(const std::string& path);
ScriptRegistry merge_registry(ScriptRegistry base,
                              const std::vector<ScriptConfig>& overrides);

}  // namespace sfr
