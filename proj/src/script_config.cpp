#include "sfr/script_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "sfr/embedded.hpp"
#include "sfr/error.hpp"
#include "sfr/unicode.hpp"

namespace sfr {
namespace {

using Json = nlohmann::ordered_json;

char32_t parse_hex_point(std::string_view text, std::string_view whole) {
  unsigned long value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value, 16);
  if (text.empty() || text.size() > 6 || ec != std::errc{} || ptr != last) {
    throw ConfigError("invalid hex code point '" + std::string(text) + "' in '" +
                      std::string(whole) + "'");
  }
  if (value > unicode::kMaxCodePoint) {
    throw ValidationError("code point " + std::string(text) + " exceeds U+10FFFF");
  }
  return static_cast<char32_t>(value);
}

std::string hex(char32_t c) { return unicode::code_point_label(c).substr(2); }

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

std::vector<CodePointRange> ranges_from_json(const Json& node, const std::string& key) {
  if (!node.is_array()) throw ConfigError(key + ": expected an array of \"XXXX-YYYY\" strings");
  std::vector<CodePointRange> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const std::string where = key + "[" + std::to_string(i) + "]";
    if (!node[i].is_string()) throw ConfigError(where + ": expected a string");
    try {
      out.push_back(parse_range(node[i].get<std::string>()));
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  return out;
}

Json ranges_to_json(const std::vector<CodePointRange>& ranges) {
  Json arr = Json::array();
  for (const auto& r : ranges) arr.push_back(format_range(r));
  return arr;
}

ScriptConfig config_from_json(const std::string& language_id, const Json& node) {
  if (!node.is_object()) throw ConfigError(language_id + ": expected an object");
  for (const auto& [k, v] : node.items()) {
    static const std::set<std::string> kKnown = {"script", "ranges", "unique", "normalization",
                                                 "diacritics", "digits"};
    if (!kKnown.contains(k)) throw ConfigError(language_id + "." + k + ": unknown key");
  }
  ScriptConfig cfg;
  cfg.language_id = language_id;

  if (!node.contains("script") || !node["script"].is_string()) {
    throw ConfigError(language_id + ".script: missing or not a string");
  }
  cfg.script_name = node["script"].get<std::string>();

  if (!node.contains("ranges")) throw ConfigError(language_id + ".ranges: missing");
  cfg.ranges = ranges_from_json(node["ranges"], language_id + ".ranges");

  if (node.contains("unique")) {
    const Json& unique = node["unique"];
    const std::string key = language_id + ".unique";
    if (!unique.is_array()) throw ConfigError(key + ": expected an array of hex strings");
    for (std::size_t i = 0; i < unique.size(); ++i) {
      const std::string where = key + "[" + std::to_string(i) + "]";
      if (!unique[i].is_string()) throw ConfigError(where + ": expected a string");
      const auto text = unique[i].get<std::string>();
      try {
        cfg.unique_points.insert(parse_hex_point(text, text));
      } catch (const ConfigError& e) {
        throw ConfigError(where + ": " + e.what());
      } catch (const ValidationError& e) {
        throw ValidationError(where + ": " + e.what());
      }
    }
  }

  if (!node.contains("normalization") || !node["normalization"].is_string()) {
    throw ConfigError(language_id + ".normalization: missing or not a string");
  }
  try {
    cfg.normalization = NormalizationPolicy::defaults_for(
        parse_normalization_kind(node["normalization"].get<std::string>()));
  } catch (const ConfigError& e) {
    throw ConfigError(language_id + ".normalization: " + e.what());
  }
  if (node.contains("diacritics")) {
    cfg.normalization.diacritic_ranges =
        ranges_from_json(node["diacritics"], language_id + ".diacritics");
  }
  if (node.contains("digits")) {
    cfg.normalization.digit_ranges = ranges_from_json(node["digits"], language_id + ".digits");
  }

  try {
    validate(cfg);
  } catch (const ValidationError& e) {
    throw ValidationError(language_id + ": " + e.what());
  }
  return cfg;
}

}  // namespace

CodePointRange make_range(char32_t start, char32_t end) {
  if (end > unicode::kMaxCodePoint) {
    throw ValidationError("range end " + unicode::code_point_label(end) + " exceeds U+10FFFF");
  }
  if (start > end) {
    throw ValidationError("range start " + unicode::code_point_label(start) + " > end " +
                          unicode::code_point_label(end));
  }
  return {start, end};
}

CodePointRange parse_range(std::string_view text) {
  const auto dash = text.find('-');
  if (dash == std::string_view::npos) {
    const char32_t c = parse_hex_point(text, text);
    return {c, c};
  }
  return make_range(parse_hex_point(text.substr(0, dash), text),
                    parse_hex_point(text.substr(dash + 1), text));
}

std::string format_range(const CodePointRange& r) { return hex(r.start) + "-" + hex(r.end); }

std::string_view to_string(NormalizationKind kind) {
  switch (kind) {
    case NormalizationKind::ArabicScript: return "ArabicScript";
    case NormalizationKind::Indic: return "Indic";
    case NormalizationKind::LatinLowercase: return "LatinLowercase";
  }
  return "LatinLowercase";
}

NormalizationKind parse_normalization_kind(std::string_view name) {
  if (name == "ArabicScript") return NormalizationKind::ArabicScript;
  if (name == "Indic") return NormalizationKind::Indic;
  if (name == "LatinLowercase") return NormalizationKind::LatinLowercase;
  throw ConfigError("unknown normalization policy '" + std::string(name) +
                    "' (expected ArabicScript, Indic or LatinLowercase)");
}

NormalizationPolicy NormalizationPolicy::defaults_for(NormalizationKind kind) {
  NormalizationPolicy p;
  p.kind = kind;
  if (kind == NormalizationKind::ArabicScript) {
    // Harakat, superscript alef, Quranic annotation marks.
    p.diacritic_ranges = {{0x064B, 0x065F}, {0x0670, 0x0670}, {0x06D6, 0x06ED}};
  } else if (kind == NormalizationKind::Indic) {
    // Devanagari, Bengali, Malayalam digits. ASCII digits are kept.
    p.digit_ranges = {{0x0966, 0x096F}, {0x09E6, 0x09EF}, {0x0D66, 0x0D6F}};
  }
  return p;
}

void validate(const ScriptConfig& cfg) {
  if (cfg.ranges.empty()) throw ValidationError("script config has no ranges");
  auto check_ranges = [](const std::vector<CodePointRange>& ranges, std::string_view what) {
    for (std::size_t i = 0; i < ranges.size(); ++i) {
      make_range(ranges[i].start, ranges[i].end);
      for (std::size_t j = i + 1; j < ranges.size(); ++j) {
        if (ranges[i].overlaps(ranges[j])) {
          throw ValidationError(std::string(what) + " " + format_range(ranges[i]) +
                                " overlaps " + format_range(ranges[j]));
        }
      }
    }
  };
  check_ranges(cfg.ranges, "range");
  check_ranges(cfg.normalization.diacritic_ranges, "diacritic range");
  check_ranges(cfg.normalization.digit_ranges, "digit range");
  for (char32_t c : cfg.unique_points) {
    if (c > unicode::kMaxCodePoint) {
      throw ValidationError("unique point " + unicode::code_point_label(c) + " exceeds U+10FFFF");
    }
  }
}

bool char_in_script(char32_t c, const ScriptConfig& cfg) {
  for (const auto& r : cfg.ranges) {
    if (r.contains(c)) return true;
  }
  return cfg.unique_points.contains(c);
}

bool DetectionScript::contains(char32_t c) const {
  return std::any_of(ranges.begin(), ranges.end(),
                     [c](const CodePointRange& r) { return r.contains(c); });
}

const ScriptConfig* ScriptRegistry::find(std::string_view language_id) const {
  auto it = configs.find(language_id);
  return it == configs.end() ? nullptr : &it->second;
}

const ScriptConfig& ScriptRegistry::at(std::string_view language_id) const {
  if (const auto* cfg = find(language_id)) return *cfg;
  std::string known;
  for (const auto& id : language_ids()) known += (known.empty() ? "" : ", ") + id;
  throw InputError("unknown language '" + std::string(language_id) + "' (known: " + known + ")");
}

std::vector<std::string> ScriptRegistry::language_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, cfg] : configs) ids.push_back(id);
  return ids;
}

std::vector<DetectionScript> default_detection_scripts() {
  return {
      {"Latin",
       {{0x0041, 0x005A}, {0x0061, 0x007A}, {0x00C0, 0x00D6}, {0x00D8, 0x00F6},
        {0x00F8, 0x024F}, {0x1E00, 0x1EFF}}},
      {"Devanagari", {{0x0900, 0x097F}, {0xA8E0, 0xA8FF}}},
      {"Bengali", {{0x0980, 0x09FF}}},
      {"Malayalam", {{0x0D00, 0x0D7F}}},
      {"Arabic",
       {{0x0600, 0x06FF}, {0x0750, 0x077F}, {0x08A0, 0x08FF}, {0xFB50, 0xFDFF}, {0xFE70, 0xFEFF}}},
      {"Cyrillic", {{0x0400, 0x052F}}},
  };
}

ScriptRegistry builtin_registry() {
  ScriptRegistry registry;
  registry.detection_scripts = default_detection_scripts();
  for (auto& cfg : parse_script_configs(embedded::builtin_scripts())) {
    registry.configs.emplace(cfg.language_id, std::move(cfg));
  }
  return registry;
}

std::vector<ScriptConfig> parse_script_configs(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ConfigError("scripts file parse error at line " +
                      std::to_string(line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1)) + ": " +
                      e.what());
  }
  if (!root.is_object()) throw ConfigError("scripts file: top level must be an object");
  std::vector<ScriptConfig> out;
  for (const auto& [language_id, node] : root.items()) {
    if (language_id.empty()) throw ConfigError("scripts file: empty language id");
    out.push_back(config_from_json(language_id, node));
  }
  return out;
}

std::string serialize_script_configs(const ScriptRegistry& registry) {
  Json root = Json::object();
  for (const auto& [id, cfg] : registry.configs) {
    Json node;
    node["script"] = cfg.script_name;
    node["ranges"] = ranges_to_json(cfg.ranges);
    Json unique = Json::array();
    for (char32_t c : cfg.unique_points) unique.push_back(hex(c));
    node["unique"] = unique;
    node["normalization"] = std::string(to_string(cfg.normalization.kind));
    node["diacritics"] = ranges_to_json(cfg.normalization.diacritic_ranges);
    node["digits"] = ranges_to_json(cfg.normalization.digit_ranges);
    root[id] = node;
  }
  return root.dump(2) + "\n";
}

ScriptRegistry merge_registry(ScriptRegistry base, const std::vector<ScriptConfig>& overrides) {
  for (const auto& cfg : overrides) base.configs.insert_or_assign(cfg.language_id, cfg);
  return base;
}

ScriptRegistry load_registry(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open scripts file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return merge_registry(builtin_registry(), parse_script_configs(buf.str()));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

}  // namespace sfr
