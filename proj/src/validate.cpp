#include "sfr/validate.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "json.hpp"

#include "sfr/embedded.hpp"
#include "sfr/error.hpp"
#include "sfr/sfr.hpp"

namespace sfr {

bool ValidationReport::passed() const { return failures() == 0; }

std::size_t ValidationReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const ValidationCheck& c) { return !c.passed; }));
}

std::vector<KnownExamples> builtin_known_examples() {
  const auto text = embedded::validation_fixtures();
  const auto root = nlohmann::ordered_json::parse(text.begin(), text.end());
  std::vector<KnownExamples> out;
  for (const auto& [lang, node] : root.items()) {
    KnownExamples ex;
    ex.language_id = lang;
    ex.positives = node.at("positive").get<std::vector<std::string>>();
    ex.negatives = node.at("negative").get<std::vector<std::string>>();
    out.push_back(std::move(ex));
  }
  return out;
}

ValidationReport validate_known_examples(const ScriptRegistry& registry,
                                         const std::vector<KnownExamples>& examples) {
  ValidationReport report;
  for (const auto& ex : examples) {
    const ScriptConfig* cfg = registry.find(ex.language_id);
    auto run = [&](const std::string& text, double expected, const char* kind) {
      ValidationCheck check{ex.language_id, kind, text, expected, std::nullopt, false, {}};
      if (!cfg) {
        check.detail = "language not in registry";
      } else {
        check.actual = sfr_text(text, *cfg).sfr;
        check.passed = check.actual && *check.actual == expected;
        if (!check.passed) check.detail = "expected SFR " + format_percent(expected) + "%";
      }
      report.checks.push_back(std::move(check));
    };
    for (const auto& s : ex.positives) run(s, 1.0, "positive");
    for (const auto& s : ex.negatives) run(s, 0.0, "negative");
  }
  return report;
}

ValidationReport validate_predictions(const ScriptRegistry& registry,
                                      const std::vector<CorpusRecord>& records,
                                      std::string_view language_id, double bound) {
  const ScriptConfig& cfg = registry.at(language_id);
  std::vector<std::string> order;
  std::map<std::string, std::vector<SfrResult>> per_model;
  for (const auto& rec : records) {
    if (!rec.utterance.model_id) continue;
    std::string lowered = *rec.utterance.model_id;
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (!lowered.starts_with("whisper")) continue;
    auto [it, inserted] = per_model.try_emplace(*rec.utterance.model_id);
    if (inserted) order.push_back(*rec.utterance.model_id);
    it->second.push_back(sfr_utterance(rec.utterance, cfg));
  }

  ValidationReport report;
  if (order.empty()) {
    report.checks.push_back({std::string(language_id), "predictions", "<no whisper rows>", bound,
                             std::nullopt, false, "predictions file has no Whisper rows"});
    return report;
  }
  for (const auto& model : order) {
    const CorpusSfr corpus = sfr_corpus(per_model[model]);
    ValidationCheck check{std::string(language_id), "predictions", model, bound,
                          corpus.mean_sfr, false, {}};
    check.passed = corpus.mean_sfr && *corpus.mean_sfr < bound;
    if (!check.passed) {
      check.detail = corpus.mean_sfr ? "corpus SFR not below " + format_percent(bound) + "%"
                                     : "corpus SFR is null";
    }
    report.checks.push_back(std::move(check));
  }
  return report;
}

}  // namespace sfr
