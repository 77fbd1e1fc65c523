#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "sfr/script_config.hpp"
#include "sfr/sfr.hpp"
#include "sfr/utterance.hpp"

namespace sfr {

struct AuditConfig {
  std::size_t window_size = 100;
  double alert_threshold = 0.8;
  // Non-null results needed in the window before alerts arm. Defaults to
  // window_size when unset.
  std::optional<std::size_t> min_window_fill;

  std::size_t effective_min_fill() const { return min_window_fill.value_or(window_size); }
};

// Throws InputError unless 0 < threshold < 1, window >= 1, fill <= window.
void validate(const AuditConfig& cfg);

enum class AlertStatus { Ok, Alerting };

struct LanguageWindow {
  std::deque<SfrResult> buffer;  // at most window_size entries, oldest first
  AlertStatus status = AlertStatus::Ok;

  std::size_t non_null() const;
  std::optional<double> mean() const;  // unweighted, nulls excluded
};

struct AuditState {
  std::map<std::string, LanguageWindow, std::less<>> languages;
  std::size_t processed = 0;
  std::size_t null_count = 0;
  std::size_t alerts_fired = 0;
  std::size_t errors = 0;
};

struct AlertEvent {
  std::string language_id;
  double window_mean = 0.0;
  std::size_t window_size = 0;      // entries currently in the window
  std::size_t window_non_null = 0;
  std::size_t sequence = 0;         // 1-based index of the triggering utterance
  std::string utterance_id;
};

struct AuditError {
  std::string utterance_id;
  std::string language_id;
  std::string message;
};

struct AuditStepResult {
  std::optional<AlertEvent> alert;
  std::optional<AuditError> error;
  std::optional<SfrResult> result;
};

// Pushes one hypothesis into its language window and fires an alert on the
// ok -> alerting edge. Reads only id, language and hypothesis; references
// are never consulted. Unknown languages leave the state untouched.
AuditStepResult audit_step(AuditState& state, const Utterance& u, const ScriptRegistry& registry,
                           const AuditConfig& cfg);

}  // namespace sfr
