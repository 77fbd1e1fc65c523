#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "sfr/error.hpp"
#include "sfr/script_config.hpp"

using namespace sfr;

namespace {

std::string data_path(const char* name) { return std::string(SFR_TEST_DATA_DIR) + "/" + name; }

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path, std::ios::binary) << body;
  return path;
}

}  // namespace

TEST_CASE("builtin registry matches the shipped script table") {
  const auto reg = builtin_registry();
  REQUIRE(reg.configs.size() == 6);

  CHECK(reg.configs.at("hi").ranges == std::vector<CodePointRange>{{0x0900, 0x097F}});
  CHECK(reg.configs.at("bn").ranges == std::vector<CodePointRange>{{0x0980, 0x09FF}});
  CHECK(reg.configs.at("ml").ranges == std::vector<CodePointRange>{{0x0D00, 0x0D7F}});
  CHECK(reg.configs.at("so").ranges == std::vector<CodePointRange>{{0x0041, 0x007A}});
  CHECK(reg.configs.at("ps").ranges.front() == CodePointRange{0x0600, 0x06FF});
  CHECK(reg.configs.at("ur").ranges.front() == CodePointRange{0x0600, 0x06FF});

  CHECK(reg.configs.at("ps").unique_points.size() == 12);
  CHECK(reg.configs.at("ur").unique_points.size() == 5);
  for (const char* lang : {"hi", "bn", "ml", "so"}) {
    CHECK(reg.configs.at(lang).unique_points.empty());
  }

  CHECK(reg.configs.at("ps").normalization.kind == NormalizationKind::ArabicScript);
  CHECK(reg.configs.at("hi").normalization.kind == NormalizationKind::Indic);
  CHECK(reg.configs.at("so").normalization.kind == NormalizationKind::LatinLowercase);
}

TEST_CASE("Perso-Arabic unique points refine the Arabic blocks") {
  const auto reg = builtin_registry();
  for (const char* lang : {"ps", "ur"}) {
    for (char32_t c : reg.configs.at(lang).unique_points) {
      CHECK(c >= 0x0600);
      CHECK(c <= 0x077F);
    }
  }
  // Pashto and Urdu sets stay disjoint.
  for (char32_t c : reg.configs.at("ps").unique_points) {
    CHECK_FALSE(reg.configs.at("ur").unique_points.contains(c));
  }
}

TEST_CASE("detection scripts cover the required scripts in a fixed order") {
  const auto reg = builtin_registry();
  std::vector<std::string> names;
  for (const auto& s : reg.detection_scripts) names.push_back(s.name);
  CHECK(names == std::vector<std::string>{"Latin", "Devanagari", "Bengali", "Malayalam", "Arabic",
                                          "Cyrillic"});
}

TEST_CASE("char_in_script") {
  const auto reg = builtin_registry();
  const auto& hi = reg.configs.at("hi");
  CHECK(char_in_script(U'क', hi));
  CHECK_FALSE(char_in_script(U'a', hi));
  CHECK(char_in_script(U'ॿ', hi));
  CHECK_FALSE(char_in_script(U'ঀ', hi));

  ScriptConfig only_unique{"xx", "Test", {{0x0041, 0x0041}}, {0x069A}, {}};
  CHECK(char_in_script(U'ښ', only_unique));
  CHECK(char_in_script(U'ښ', reg.configs.at("ps")));

  // Pure function: repeated calls agree across the full BMP for every config.
  for (const auto& [id, cfg] : reg.configs) {
    for (char32_t c = 0; c < 0x10000; c += 7) {
      REQUIRE(char_in_script(c, cfg) == char_in_script(c, cfg));
    }
  }
}

TEST_CASE("range parsing and invariants") {
  CHECK(parse_range("0600-06FF") == CodePointRange{0x0600, 0x06FF});
  CHECK(parse_range("0670") == CodePointRange{0x0670, 0x0670});
  CHECK(format_range({0x41, 0x7A}) == "0041-007A");
  CHECK(format_range({0x1F600, 0x1F64F}) == "1F600-1F64F");
  CHECK_THROWS_AS(parse_range("06FF-0600"), ValidationError);
  CHECK_THROWS_AS(parse_range("0600-110000"), ValidationError);
  CHECK_THROWS_AS(parse_range("zz-0600"), ConfigError);
  CHECK_THROWS_AS(parse_range(""), ConfigError);

  ScriptConfig overlapping{"xx", "Test", {{0x0600, 0x06FF}, {0x06F0, 0x0700}}, {}, {}};
  CHECK_THROWS_AS(validate(overlapping), ValidationError);
  ScriptConfig empty{"xx", "Test", {}, {}, {}};
  CHECK_THROWS_AS(validate(empty), ValidationError);
}

TEST_CASE("load_registry merges over the built-ins") {
  const auto reg = load_registry(data_path("override_scripts.json"));
  CHECK(reg.configs.size() == 7);
  REQUIRE(reg.find("ta"));
  CHECK(reg.at("ta").ranges == std::vector<CodePointRange>{{0x0B80, 0x0BFF}});
  CHECK(reg.at("ta").normalization.digit_ranges == std::vector<CodePointRange>{{0x0BE6, 0x0BEF}});
  CHECK(reg.at("so").ranges.size() == 1);
  CHECK(reg.at("so").ranges.front() == CodePointRange{0x0061, 0x007A});
  CHECK(reg.at("hi") == builtin_registry().at("hi"));
}

TEST_CASE("load_registry error reporting") {
  SUBCASE("start greater than end is a validation error") {
    auto path = write_temp("sfr_bad_range.json",
                           R"({"xx": {"script": "X", "ranges": ["0700-0600"], "normalization": "Indic"}})");
    CHECK_THROWS_AS(load_registry(path.string()), ValidationError);
  }
  SUBCASE("overlapping ranges are a validation error") {
    auto path = write_temp(
        "sfr_overlap.json",
        R"({"xx": {"script": "X", "ranges": ["0600-06FF", "06FF-0700"], "normalization": "Indic"}})");
    CHECK_THROWS_AS(load_registry(path.string()), ValidationError);
  }
  SUBCASE("syntax errors name the line") {
    auto path = write_temp("sfr_syntax.json", "{\n  \"xx\": {\n    \"script\": \"X\",,\n  }\n}\n");
    try {
      load_registry(path.string());
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
  SUBCASE("bad values name the key") {
    auto path = write_temp("sfr_badkey.json",
                           R"({"xx": {"script": "X", "ranges": ["0600-06FF"], "normalization": "Greek"}})");
    try {
      load_registry(path.string());
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("xx.normalization") != std::string::npos);
    }
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_registry("/nonexistent/scripts.json"), ConfigError); }
}

TEST_CASE("registry round-trips through the config format") {
  const auto reg = builtin_registry();
  const auto text = serialize_script_configs(reg);
  const auto reloaded = merge_registry(ScriptRegistry{{}, default_detection_scripts()},
                                       parse_script_configs(text));
  CHECK(reloaded == reg);

  auto path = write_temp("sfr_roundtrip.json", text);
  CHECK(load_registry(path.string()) == reg);
}

TEST_CASE("unknown language lists the known ones") {
  const auto reg = builtin_registry();
  try {
    reg.at("xx");
    FAIL("expected InputError");
  } catch (const InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bn, hi, ml, ps, so, ur") != std::string::npos);
  }
}
