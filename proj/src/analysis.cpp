#include "sfr/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "sfr/error.hpp"
#include "sfr/sfr.hpp"

namespace sfr {
namespace {

std::string fixed1(double v) {
  char buf[32];
  const double r = round_half_away(v, 1);
  std::snprintf(buf, sizeof buf, "%.1f", r == 0.0 ? 0.0 : r);
  return buf;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void push_unique(std::vector<std::string>& v, const std::string& s) {
  if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

}  // namespace

void EvalMatrix::add(EvalCell cell) {
  if (find(cell.model_id, cell.language_id)) {
    throw InputError("duplicate cell (" + cell.model_id + ", " + cell.language_id + ")");
  }
  const bool has_metric = cell.sfr_percent.has_value() || cell.wer_percent.has_value();
  if (cell.evaluated != has_metric) {
    throw InputError("cell (" + cell.model_id + ", " + cell.language_id +
                     "): evaluated flag must be set iff a metric is present");
  }
  push_unique(models_, cell.model_id);
  push_unique(languages_, cell.language_id);
  cells_.push_back(std::move(cell));
}

const EvalCell* EvalMatrix::find(std::string_view model, std::string_view language) const {
  for (const auto& c : cells_) {
    if (c.model_id == model && c.language_id == language) return &c;
  }
  return nullptr;
}

std::size_t EvalMatrix::evaluated_count() const {
  return static_cast<std::size_t>(
      std::count_if(cells_.begin(), cells_.end(), [](const EvalCell& c) { return c.evaluated; }));
}

CollapseReport classify_collapse(const EvalMatrix& m, double threshold_percent,
                                 double high_percent) {
  if (!(threshold_percent > 0.0 && threshold_percent < 100.0)) {
    throw InputError("collapse threshold must lie in (0, 100)");
  }
  CollapseReport report;
  report.threshold_percent = threshold_percent;

  std::optional<double> max_collapsed;
  std::optional<double> min_healthy;
  for (const auto& cell : m.cells()) {
    if (!cell.evaluated || !cell.sfr_percent) continue;
    const double sfr = *cell.sfr_percent;
    ++report.n_evaluated;
    if (sfr < threshold_percent) {
      report.collapsed_pairs.emplace_back(cell.model_id, cell.language_id);
      max_collapsed = std::max(max_collapsed.value_or(sfr), sfr);
    } else {
      min_healthy = std::min(min_healthy.value_or(sfr), sfr);
    }
    if (sfr < threshold_percent) {
      ++report.bimodality.below;
    } else if (sfr <= high_percent) {
      ++report.bimodality.intermediate;
    } else {
      ++report.bimodality.above;
    }
  }
  if (report.n_evaluated == 0) throw InputError("no evaluated cells to classify");

  report.proportion = static_cast<double>(report.collapsed_pairs.size()) /
                      static_cast<double>(report.n_evaluated);
  report.wilson_ci = wilson_ci(report.collapsed_pairs.size(), report.n_evaluated);
  if (max_collapsed && min_healthy) {
    report.gap = std::make_pair(*max_collapsed, *min_healthy);
    if (*max_collapsed < *min_healthy) report.insensitive_interval = report.gap;
  }
  return report;
}

double normal_quantile_two_sided(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw InputError("confidence must lie in (0, 1)");
  }
  const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, 1.0 - (1.0 - confidence) / 2.0);
}

std::pair<double, double> wilson_ci(std::size_t successes, std::size_t n, double confidence) {
  if (n == 0) throw InputError("Wilson interval needs n > 0");
  if (successes > n) throw InputError("Wilson interval needs successes <= n");
  const double z = normal_quantile_two_sided(confidence);
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = (z / denom) * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  const double low = successes == 0 ? 0.0 : std::max(0.0, center - half);
  const double high = successes == n ? 1.0 : std::min(1.0, center + half);
  return {low, high};
}

double median(std::vector<double> values) {
  if (values.empty()) throw InputError("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return (values[mid - 1] + values[mid]) / 2.0;
}

std::string default_family_of(std::string_view model_id) {
  const std::string id = lower(model_id);
  if (id.starts_with("whisper")) return "Whisper";
  if (id.starts_with("mms")) return "MMS-1B";
  if (id.starts_with("seamless")) return "SeamlessM4T-v2";
  return std::string(model_id);
}

std::vector<FamilySummaryRow> family_summary(
    const EvalMatrix& m,
    const std::function<std::optional<std::string>(std::string_view)>& family_of,
    double threshold_percent) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> values;
  std::vector<double> all;
  for (const auto& cell : m.cells()) {
    auto family = family_of(cell.model_id);
    if (!family) throw InputError("model '" + cell.model_id + "' has no family");
    push_unique(order, *family);
    values[*family];
    if (cell.evaluated && cell.sfr_percent) {
      values[*family].push_back(*cell.sfr_percent);
      all.push_back(*cell.sfr_percent);
    }
  }

  auto summarize = [threshold_percent](std::string name, const std::vector<double>& v) {
    FamilySummaryRow row;
    row.family = std::move(name);
    row.evaluated = v.size();
    row.collapsed = static_cast<std::size_t>(
        std::count_if(v.begin(), v.end(), [&](double s) { return s < threshold_percent; }));
    if (!v.empty()) {
      row.mean_sfr = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      row.median_sfr = median(v);
    }
    return row;
  };

  std::vector<FamilySummaryRow> rows;
  for (const auto& family : order) rows.push_back(summarize(family, values[family]));
  rows.push_back(summarize(std::string(kAllModelsFamily), all));
  return rows;
}

std::vector<FamilySummaryRow> family_summary(const EvalMatrix& m,
                                             const std::map<std::string, std::string>& family_of,
                                             double threshold_percent) {
  return family_summary(
      m,
      [&](std::string_view model) -> std::optional<std::string> {
        auto it = family_of.find(std::string(model));
        if (it == family_of.end()) return std::nullopt;
        return it->second;
      },
      threshold_percent);
}

std::string_view to_string(Quadrant q) {
  switch (q) {
    case Quadrant::LowWerHighSfr: return "low-wer/high-sfr";
    case Quadrant::HighWerLowSfr: return "high-wer/low-sfr";
    case Quadrant::HighWerHighSfr: return "high-wer/high-sfr";
    case Quadrant::LowWerLowSfr: return "low-wer/low-sfr";
  }
  return "low-wer/low-sfr";
}

Quadrant classify_quadrant(double wer_percent, double sfr_percent, const QuadrantBounds& bounds) {
  const bool high_wer = wer_percent >= bounds.wer_percent;
  const bool low_sfr = sfr_percent < bounds.sfr_percent;
  if (high_wer) return low_sfr ? Quadrant::HighWerLowSfr : Quadrant::HighWerHighSfr;
  return low_sfr ? Quadrant::LowWerLowSfr : Quadrant::LowWerHighSfr;
}

std::vector<ScatterRecord> scatter_data(const EvalMatrix& m, double threshold_percent,
                                        const QuadrantBounds& bounds) {
  std::vector<ScatterRecord> out;
  for (const auto& cell : m.cells()) {
    if (!cell.evaluated || !cell.sfr_percent) continue;
    ScatterRecord r;
    r.model_id = cell.model_id;
    r.language_id = cell.language_id;
    r.wer_percent = cell.wer_percent;
    r.sfr_percent = *cell.sfr_percent;
    r.collapsed = r.sfr_percent < threshold_percent;
    if (r.wer_percent) r.quadrant = classify_quadrant(*r.wer_percent, r.sfr_percent, bounds);
    out.push_back(std::move(r));
  }
  return out;
}

std::string scatter_csv(const std::vector<ScatterRecord>& records) {
  std::ostringstream os;
  os << "model,language,wer,sfr,collapsed,quadrant\n";
  for (const auto& r : records) {
    os << r.model_id << ',' << r.language_id << ',' << (r.wer_percent ? fixed1(*r.wer_percent) : "")
       << ',' << fixed1(r.sfr_percent) << ',' << (r.collapsed ? "true" : "false") << ','
       << (r.quadrant ? to_string(*r.quadrant) : "") << '\n';
  }
  return os.str();
}

GatedReport gated_report(const EvalMatrix& m, double sfr_gate, double threshold_percent) {
  if (!(sfr_gate > 0.0 && sfr_gate < 1.0)) throw InputError("SFR gate must lie in (0, 1)");
  GatedReport report;
  report.sfr_gate = sfr_gate;
  report.threshold_percent = threshold_percent;
  for (const auto& cell : m.cells()) {
    GatedCell g{.cell = &cell};
    if (cell.evaluated && cell.sfr_percent) {
      g.collapsed = *cell.sfr_percent < threshold_percent;
      g.wer_flagged = *cell.sfr_percent < sfr_gate * 100.0;
    }
    report.flagged_wer_count += g.wer_flagged ? 1 : 0;
    report.collapsed_count += g.collapsed ? 1 : 0;
    report.cells.push_back(g);
  }
  return report;
}

std::string render_gated_text(const EvalMatrix& m, const GatedReport& report) {
  auto gated_for = [&](const EvalCell* cell) -> const GatedCell* {
    for (const auto& g : report.cells) {
      if (g.cell == cell) return &g;
    }
    return nullptr;
  };

  std::size_t model_width = 5;
  for (const auto& model : m.models()) model_width = std::max(model_width, model.size());

  std::ostringstream os;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(model_width), "model");
  os << buf;
  for (const auto& lang : m.languages()) {
    std::snprintf(buf, sizeof buf, " | %9s %9s", (lang + " SFR").c_str(), (lang + " WER").c_str());
    os << buf;
  }
  os << '\n';

  for (const auto& model : m.models()) {
    std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(model_width), model.c_str());
    os << buf;
    for (const auto& lang : m.languages()) {
      const EvalCell* cell = m.find(model, lang);
      std::string sfr = "---";
      std::string wer = "---";
      if (cell && cell->evaluated) {
        const GatedCell* g = gated_for(cell);
        sfr = cell->sfr_percent ? fixed1(*cell->sfr_percent) : "null";
        if (g && g->collapsed) sfr = "*" + sfr + "*";
        wer = cell->wer_percent ? fixed1(*cell->wer_percent) : "n/a";
        if (g && g->wer_flagged && cell->wer_percent) wer = "[" + wer + "]";
      }
      std::snprintf(buf, sizeof buf, " | %9s %9s", sfr.c_str(), wer.c_str());
      os << buf;
    }
    os << '\n';
  }
  std::snprintf(buf, sizeof buf, "%.4g", report.sfr_gate);
  os << "*x*  SFR below " << fixed1(report.threshold_percent) << "% (script collapse)\n"
     << "[x]  WER reported but not meaningful: SFR below gate " << buf << '\n'
     << "collapsed cells: " << report.collapsed_count
     << ", gated WER cells: " << report.flagged_wer_count << '\n';
  return os.str();
}

}  // namespace sfr
