#pragma once

#include <optional>
#include <string>

namespace sfr {

// One ASR hypothesis, optionally paired with its reference transcription.
struct Utterance {
  std::string id;
  std::string language_id;
  std::string hypothesis;  // UTF-8, as produced by the model
  std::optional<std::string> reference;
  std::optional<std::string> model_id;

  bool operator==(const Utterance&) const = default;
};

}  // namespace sfr
