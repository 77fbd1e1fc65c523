#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sfr {

inline constexpr double kDefaultCollapseThresholdPercent = 10.0;
inline constexpr double kDefaultHighSfrPercent = 90.0;
inline constexpr double kDefaultWerGate = 0.8;
inline constexpr double kDefaultHighWerPercent = 40.0;

// One model x language result. Unevaluated cells carry no metrics and are
// never treated as zero.
struct EvalCell {
  std::string model_id;
  std::string language_id;
  std::optional<double> sfr_percent;
  std::optional<double> wer_percent;
  bool evaluated = false;

  bool operator==(const EvalCell&) const = default;
};

class EvalMatrix {
 public:
  // Throws InputError on a duplicate (model, language) pair or a cell whose
  // evaluated flag disagrees with its metrics.
  void add(EvalCell cell);

  const std::vector<EvalCell>& cells() const { return cells_; }
  const std::vector<std::string>& models() const { return models_; }
  const std::vector<std::string>& languages() const { return languages_; }
  const EvalCell* find(std::string_view model, std::string_view language) const;
  std::size_t evaluated_count() const;
  bool empty() const { return cells_.empty(); }

  bool operator==(const EvalMatrix&) const = default;

 private:
  std::vector<EvalCell> cells_;
  std::vector<std::string> models_;
  std::vector<std::string> languages_;
};

struct BimodalityCounts {
  std::size_t below = 0;         // sfr < collapse threshold (10 by default)
  std::size_t intermediate = 0;  // threshold <= sfr <= high boundary
  std::size_t above = 0;         // sfr > high boundary (90 by default)
};

struct CollapseReport {
  double threshold_percent = kDefaultCollapseThresholdPercent;
  std::vector<std::pair<std::string, std::string>> collapsed_pairs;  // (model, language)
  std::size_t n_evaluated = 0;
  double proportion = 0.0;
  std::pair<double, double> wilson_ci{0.0, 0.0};
  // (max collapsed SFR, min non-collapsed SFR); absent when either side is empty.
  std::optional<std::pair<double, double>> gap;
  // Thresholds in this closed interval select the same collapsed set as long
  // as they sit strictly inside it. Empty when gap is absent or max >= min.
  std::optional<std::pair<double, double>> insensitive_interval;
  BimodalityCounts bimodality;
};

// Cells with a present SFR take part; threshold must lie in (0, 100).
// Throws InputError when nothing is evaluated.
CollapseReport classify_collapse(const EvalMatrix& m,
                                 double threshold_percent = kDefaultCollapseThresholdPercent,
                                 double high_percent = kDefaultHighSfrPercent);

// Two-sided normal quantile for the given central confidence (1.959964 at 0.95).
double normal_quantile_two_sided(double confidence);

// Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_ci(std::size_t successes, std::size_t n, double confidence = 0.95);

double median(std::vector<double> values);

struct FamilySummaryRow {
  std::string family;
  std::optional<double> mean_sfr;
  std::optional<double> median_sfr;
  std::size_t collapsed = 0;
  std::size_t evaluated = 0;
};

inline constexpr std::string_view kAllModelsFamily = "All models";

// Known families by model-id prefix: whisper*, mms*, seamless*. Unknown ids
// are their own family.
std::string default_family_of(std::string_view model_id);

// One row per family in first-appearance order, then "All models".
// family_of must map every model; an empty optional means "unmapped" and
// raises InputError.
std::vector<FamilySummaryRow> family_summary(
    const EvalMatrix& m, const std::function<std::optional<std::string>(std::string_view)>& family_of,
    double threshold_percent = kDefaultCollapseThresholdPercent);
std::vector<FamilySummaryRow> family_summary(const EvalMatrix& m,
                                             const std::map<std::string, std::string>& family_of,
                                             double threshold_percent = kDefaultCollapseThresholdPercent);

enum class Quadrant { LowWerHighSfr, HighWerLowSfr, HighWerHighSfr, LowWerLowSfr };
std::string_view to_string(Quadrant q);

struct QuadrantBounds {
  double sfr_percent = kDefaultCollapseThresholdPercent;  // below: low SFR
  double wer_percent = kDefaultHighWerPercent;            // at or above: high WER
};

Quadrant classify_quadrant(double wer_percent, double sfr_percent, const QuadrantBounds& bounds = {});

struct ScatterRecord {
  std::string model_id;
  std::string language_id;
  std::optional<double> wer_percent;
  double sfr_percent = 0.0;
  bool collapsed = false;
  std::optional<Quadrant> quadrant;  // absent without WER
};

// One record per evaluated cell with SFR.
std::vector<ScatterRecord> scatter_data(const EvalMatrix& m,
                                        double threshold_percent = kDefaultCollapseThresholdPercent,
                                        const QuadrantBounds& bounds = {});
std::string scatter_csv(const std::vector<ScatterRecord>& records);

struct GatedCell {
  const EvalCell* cell = nullptr;
  bool collapsed = false;
  bool wer_flagged = false;  // SFR below the gate: WER not meaningful
};

struct GatedReport {
  double sfr_gate = kDefaultWerGate;
  double threshold_percent = kDefaultCollapseThresholdPercent;
  std::vector<GatedCell> cells;  // same order as the matrix
  std::size_t flagged_wer_count = 0;
  std::size_t collapsed_count = 0;
};

// sfr_gate is a ratio in (0, 1). Only cells with SFR strictly below
// sfr_gate * 100 have their WER flagged.
GatedReport gated_report(const EvalMatrix& m, double sfr_gate = kDefaultWerGate,
                         double threshold_percent = kDefaultCollapseThresholdPercent);

// Model rows x language columns, SFR then WER. Collapsed SFR is wrapped in
// asterisks, a gated WER in brackets, unevaluated cells print "---".
std::string render_gated_text(const EvalMatrix& m, const GatedReport& report);

}  // namespace sfr
