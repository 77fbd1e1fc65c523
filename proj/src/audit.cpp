#include "sfr/audit.hpp"

#include "sfr/error.hpp"

namespace sfr {
namespace {

AuditStepResult step_hypothesis(AuditState& state, std::string_view utterance_id,
                                std::string_view language_id, std::string_view hypothesis,
                                const ScriptRegistry& registry, const AuditConfig& cfg) {
  AuditStepResult out;
  const ScriptConfig* script = registry.find(language_id);
  if (!script) {
    ++state.errors;
    out.error = AuditError{std::string(utterance_id), std::string(language_id),
                           "unknown language '" + std::string(language_id) + "'"};
    return out;
  }

  SfrResult result = sfr_text(hypothesis, *script, std::string(utterance_id));
  ++state.processed;
  if (!result.sfr) ++state.null_count;

  auto it = state.languages.find(language_id);
  if (it == state.languages.end()) {
    it = state.languages.emplace(std::string(language_id), LanguageWindow{}).first;
  }
  LanguageWindow& window = it->second;
  window.buffer.push_back(result);
  while (window.buffer.size() > cfg.window_size) window.buffer.pop_front();
  out.result = std::move(result);

  const std::size_t filled = window.non_null();
  const auto mean = window.mean();
  if (!mean) return out;

  if (window.status == AlertStatus::Ok) {
    if (filled >= cfg.effective_min_fill() && *mean < cfg.alert_threshold) {
      window.status = AlertStatus::Alerting;
      ++state.alerts_fired;
      out.alert = AlertEvent{std::string(language_id), *mean, window.buffer.size(), filled,
                             state.processed, std::string(utterance_id)};
    }
  } else if (*mean >= cfg.alert_threshold) {
    window.status = AlertStatus::Ok;
  }
  return out;
}

}  // namespace

void validate(const AuditConfig& cfg) {
  if (!(cfg.alert_threshold > 0.0 && cfg.alert_threshold < 1.0)) {
    throw InputError("audit threshold must lie in (0, 1)");
  }
  if (cfg.window_size < 1) throw InputError("audit window must hold at least one utterance");
  if (cfg.effective_min_fill() > cfg.window_size) {
    throw InputError("audit minimum fill cannot exceed the window size");
  }
}

std::size_t LanguageWindow::non_null() const {
  std::size_t n = 0;
  for (const auto& r : buffer) n += r.sfr ? 1 : 0;
  return n;
}

std::optional<double> LanguageWindow::mean() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : buffer) {
    if (r.sfr) {
      sum += *r.sfr;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

AuditStepResult audit_step(AuditState& state, const Utterance& u, const ScriptRegistry& registry,
                           const AuditConfig& cfg) {
  return step_hypothesis(state, u.id, u.language_id, u.hypothesis, registry, cfg);
}

}  // namespace sfr
