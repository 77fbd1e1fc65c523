#include "sfr/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "sfr/analysis.hpp"
#include "sfr/audit.hpp"
#include "sfr/corpus_io.hpp"
#include "sfr/embedded.hpp"
#include "sfr/error.hpp"
#include "sfr/eval_metrics.hpp"
#include "sfr/sfr.hpp"
#include "sfr/taxonomy.hpp"
#include "sfr/unicode.hpp"
#include "sfr/validate.hpp"

namespace sfr::cli {
namespace {

using Json = nlohmann::ordered_json;

// Raised for bad flag values detected after parsing (unknown --lang etc.).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

struct CommonOptions {
  std::string scripts;
  std::string format = "text";
};

ScriptRegistry registry_for(const CommonOptions& common) {
  return common.scripts.empty() ? builtin_registry() : load_registry(common.scripts);
}

std::vector<CorpusRecord> read_corpus(const std::string& path, Streams io) {
  if (path == "-") return read_jsonl(io.in, "<stdin>");
  return read_jsonl(std::filesystem::path(path));
}

const ScriptConfig& language_for(const ScriptRegistry& registry, const CorpusRecord& rec,
                                 const std::string& lang_flag) {
  const std::string& lang = lang_flag.empty() ? rec.utterance.language_id : lang_flag;
  if (lang.empty()) {
    throw InputError("record '" + rec.utterance.id + "' has no 'lang' and no --lang was given");
  }
  return registry.at(lang);
}

void check_lang_flag(const ScriptRegistry& registry, const std::string& lang) {
  if (lang.empty() || registry.find(lang)) return;
  try {
    registry.at(lang);
  } catch (const InputError& e) {
    throw UsageError(e.what());
  }
}

std::string pct(std::optional<double> ratio) { return format_percent(ratio); }

std::string fixed(double v, int decimals) {
  char buf[64];
  const double r = round_half_away(v, decimals);
  std::snprintf(buf, sizeof buf, "%.*f", decimals, r == 0.0 ? 0.0 : r);
  return buf;
}

Json optional_json(std::optional<double> v) { return v ? Json(*v) : Json(nullptr); }

std::string csv_number(std::optional<double> v) {
  if (!v) return "";
  return Json(*v).dump();
}

// A CSV field; quotes when needed.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string lpad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void add_common(CLI::App* cmd, CommonOptions& common, const std::vector<std::string>& formats) {
  cmd->add_option("--scripts", common.scripts, "Script config override file (JSON)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--format", common.format, "Output format")
      ->check(CLI::IsMember(formats))
      ->capture_default_str();
}

// ---------------------------------------------------------------- score

struct ScoreOptions {
  CommonOptions common;
  std::string corpus;
  std::string lang;
};

int cmd_score(const ScoreOptions& opt, Streams io) {
  const ScriptRegistry registry = registry_for(opt.common);
  check_lang_flag(registry, opt.lang);
  const auto records = read_corpus(opt.corpus, io);

  std::vector<SfrResult> results;
  std::vector<std::string> langs;
  for (const auto& rec : records) {
    const ScriptConfig& cfg = language_for(registry, rec, opt.lang);
    results.push_back(sfr_utterance(rec.utterance, cfg));
    langs.push_back(cfg.language_id);
  }
  const CorpusSfr corpus = sfr_corpus(results);

  const auto& fmt = opt.common.format;
  if (fmt == "jsonl") {
    for (std::size_t i = 0; i < results.size(); ++i) {
      Json row;
      row["id"] = results[i].utterance_id;
      row["lang"] = langs[i];
      row["countable"] = results[i].countable_chars;
      row["target"] = results[i].target_chars;
      row["sfr"] = optional_json(results[i].sfr);
      io.out << row.dump() << '\n';
    }
    Json footer;
    footer["corpus"] = {{"utterances", corpus.utterance_count},
                        {"null", corpus.null_count},
                        {"mean_sfr", optional_json(corpus.mean_sfr)},
                        {"weighted_sfr", optional_json(corpus.weighted_sfr)}};
    io.out << footer.dump() << '\n';
  } else if (fmt == "csv") {
    io.out << "id,lang,countable,target,sfr\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      io.out << csv_field(r.utterance_id) << ',' << langs[i] << ',' << r.countable_chars << ','
             << r.target_chars << ',' << csv_number(r.sfr) << '\n';
    }
    io.out << "# utterances=" << corpus.utterance_count << " null=" << corpus.null_count
           << " mean_sfr=" << csv_number(corpus.mean_sfr)
           << " weighted_sfr=" << csv_number(corpus.weighted_sfr) << '\n';
  } else {
    std::size_t id_width = 2;
    for (const auto& r : results) id_width = std::max(id_width, r.utterance_id.size());
    io.out << pad("id", id_width) << "  lang  countable  target     SFR%\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      io.out << pad(r.utterance_id, id_width) << "  " << pad(langs[i], 4) << "  "
             << lpad(std::to_string(r.countable_chars), 9) << "  "
             << lpad(std::to_string(r.target_chars), 6) << "  " << lpad(pct(r.sfr), 7) << '\n';
    }
    io.out << "utterances: " << corpus.utterance_count << "  null: " << corpus.null_count << '\n'
           << "corpus SFR (mean over utterances): " << pct(corpus.mean_sfr) << "%\n"
           << "corpus SFR (character-weighted):   " << pct(corpus.weighted_sfr) << "%\n";
  }
  if (!corpus.mean_sfr) {
    io.err << "warning: corpus SFR is null (no countable characters in any hypothesis)\n";
  }
  return kOk;
}

// ---------------------------------------------------------------- eval

struct EvalOptions {
  CommonOptions common;
  std::string corpus;
  std::string lang;
};

int cmd_eval(const EvalOptions& opt, Streams io) {
  const ScriptRegistry registry = registry_for(opt.common);
  check_lang_flag(registry, opt.lang);
  const auto records = read_corpus(opt.corpus, io);

  struct Row {
    std::string id;
    std::string lang;
    SfrResult sfr;
    EditStats words;
    EditStats chars;
  };
  std::vector<Row> rows;
  std::vector<SfrResult> sfr_results;
  EditStats word_total;
  EditStats char_total;
  for (const auto& rec : records) {
    const ScriptConfig& cfg = language_for(registry, rec, opt.lang);
    Row row{rec.utterance.id, cfg.language_id, sfr_utterance(rec.utterance, cfg),
            word_edit_stats(rec.utterance, cfg.normalization),
            char_edit_stats(rec.utterance, cfg.normalization)};
    word_total += row.words;
    char_total += row.chars;
    sfr_results.push_back(row.sfr);
    rows.push_back(std::move(row));
  }
  const CorpusSfr corpus = sfr_corpus(sfr_results);
  std::optional<double> corpus_wer;
  std::optional<double> corpus_cer;
  if (word_total.reference_len > 0) corpus_wer = word_total.rate();
  if (char_total.reference_len > 0) corpus_cer = char_total.rate();

  const auto& fmt = opt.common.format;
  if (fmt == "jsonl") {
    for (const auto& r : rows) {
      Json j;
      j["id"] = r.id;
      j["lang"] = r.lang;
      j["sfr"] = optional_json(r.sfr.sfr);
      j["wer"] = r.words.rate();
      j["cer"] = r.chars.rate();
      j["substitutions"] = r.words.substitutions;
      j["deletions"] = r.words.deletions;
      j["insertions"] = r.words.insertions;
      j["reference_words"] = r.words.reference_len;
      io.out << j.dump() << '\n';
    }
    Json footer;
    footer["corpus"] = {{"utterances", corpus.utterance_count},
                        {"null", corpus.null_count},
                        {"mean_sfr", optional_json(corpus.mean_sfr)},
                        {"weighted_sfr", optional_json(corpus.weighted_sfr)},
                        {"wer", optional_json(corpus_wer)},
                        {"cer", optional_json(corpus_cer)}};
    io.out << footer.dump() << '\n';
  } else if (fmt == "csv") {
    io.out << "id,lang,sfr,wer,cer,substitutions,deletions,insertions,reference_words\n";
    for (const auto& r : rows) {
      io.out << csv_field(r.id) << ',' << r.lang << ',' << csv_number(r.sfr.sfr) << ','
             << csv_number(r.words.rate()) << ',' << csv_number(r.chars.rate()) << ','
             << r.words.substitutions << ',' << r.words.deletions << ',' << r.words.insertions
             << ',' << r.words.reference_len << '\n';
    }
    io.out << "# utterances=" << corpus.utterance_count << " mean_sfr=" << csv_number(corpus.mean_sfr)
           << " weighted_sfr=" << csv_number(corpus.weighted_sfr)
           << " wer=" << csv_number(corpus_wer) << " cer=" << csv_number(corpus_cer) << '\n';
  } else {
    std::size_t id_width = 2;
    for (const auto& r : rows) id_width = std::max(id_width, r.id.size());
    io.out << pad("id", id_width) << "  lang     SFR%     WER%     CER%   S   D   I\n";
    for (const auto& r : rows) {
      io.out << pad(r.id, id_width) << "  " << pad(r.lang, 4) << "  " << lpad(pct(r.sfr.sfr), 7)
             << "  " << lpad(pct(r.words.rate()), 7) << "  " << lpad(pct(r.chars.rate()), 7) << "  "
             << lpad(std::to_string(r.words.substitutions), 2) << "  "
             << lpad(std::to_string(r.words.deletions), 2) << "  "
             << lpad(std::to_string(r.words.insertions), 2) << '\n';
    }
    io.out << "utterances: " << corpus.utterance_count << "  null SFR: " << corpus.null_count << '\n'
           << "corpus SFR (mean over utterances): " << pct(corpus.mean_sfr) << "%\n"
           << "corpus SFR (character-weighted):   " << pct(corpus.weighted_sfr) << "%\n"
           << "corpus WER: " << pct(corpus_wer) << "%  (" << word_total.errors() << " / "
           << word_total.reference_len << " words)\n"
           << "corpus CER: " << pct(corpus_cer) << "%  (" << char_total.errors() << " / "
           << char_total.reference_len << " chars)\n";
    if (corpus.mean_sfr && corpus_wer && *corpus.mean_sfr < kDefaultWerGate) {
      io.out << "note: SFR below " << pct(kDefaultWerGate)
             << "%; WER is not meaningful for this corpus\n";
    }
  }
  return kOk;
}

// ---------------------------------------------------------------- taxonomy

struct TaxonomyCliOptions {
  CommonOptions common;
  std::string corpus;
  std::string lang;
  std::string group_by = "model";
  TaxonomyOptions taxonomy;
};

int cmd_taxonomy(const TaxonomyCliOptions& opt, Streams io) {
  const ScriptRegistry registry = registry_for(opt.common);
  check_lang_flag(registry, opt.lang);
  const auto records = read_corpus(opt.corpus, io);

  std::vector<TaxonomyLabel> labels;
  std::map<std::string, std::string> grouping;
  std::map<std::string, std::size_t> looping_per_group;
  for (const auto& rec : records) {
    const ScriptConfig& cfg = language_for(registry, rec, opt.lang);
    auto label = classify_dominant(rec.utterance, registry, cfg, opt.taxonomy);
    std::string group = "all";
    if (opt.group_by == "model") {
      group = rec.utterance.model_id.value_or("unknown");
    } else if (opt.group_by == "lang") {
      group = cfg.language_id;
    }
    if (!grouping.emplace(label.utterance_id, group).second) {
      throw InputError("duplicate utterance id '" + label.utterance_id + "'");
    }
    looping_per_group[group] += label.looping_flag ? 1 : 0;
    labels.push_back(std::move(label));
  }
  const auto table = taxonomy_table(labels, grouping);

  const auto& fmt = opt.common.format;
  if (fmt == "jsonl") {
    for (const auto& l : labels) {
      Json j;
      j["id"] = l.utterance_id;
      j["group"] = grouping.at(l.utterance_id);
      j["dominant_script"] = l.dominant_script;
      j["dominant_fraction"] = optional_json(l.dominant_fraction);
      j["tie"] = l.tie;
      j["bucket"] = std::string(to_string(l.bucket));
      j["looping_score"] = l.looping_score;
      j["looping_flag"] = l.looping_flag;
      io.out << j.dump() << '\n';
    }
  } else if (fmt == "csv") {
    io.out << "group,latin,devanagari,target,other,n,latin_pct,devanagari_pct,target_pct,other_pct,"
              "looping\n";
    for (const auto& row : table) {
      io.out << csv_field(row.group_id);
      for (auto c : row.counts) io.out << ',' << c;
      io.out << ',' << row.n;
      for (auto p : row.percent) io.out << ',' << p;
      io.out << ',' << looping_per_group[row.group_id] << '\n';
    }
  } else {
    std::size_t width = 5;
    for (const auto& row : table) width = std::max(width, row.group_id.size());
    io.out << "Dominant output script (% of utterances)\n"
           << pad("group", width) << "  Latin  Devang.  Target  Other      n  looping\n";
    for (const auto& row : table) {
      io.out << pad(row.group_id, width) << "  " << lpad(std::to_string(row.percent[0]), 5) << "  "
             << lpad(std::to_string(row.percent[1]), 7) << "  "
             << lpad(std::to_string(row.percent[2]), 6) << "  "
             << lpad(std::to_string(row.percent[3]), 5) << "  " << lpad(std::to_string(row.n), 5)
             << "  " << lpad(std::to_string(looping_per_group[row.group_id]), 7) << '\n';
    }
    io.out << "Other covers Arabic, Cyrillic, mixed-script, unclassified and empty output; rows "
              "may not sum to 100 due to independent rounding.\n";
  }
  return kOk;
}

// ---------------------------------------------------------------- report

struct ReportOptions {
  CommonOptions common;
  std::string matrix;
  bool builtin = false;
  std::vector<std::string> from_jsonl;
  std::string lang;
  std::string families;
  std::string published;
  std::string scatter_out;
  std::string csv_out;
  double threshold = kDefaultCollapseThresholdPercent;
  double high = kDefaultHighSfrPercent;
  double gate = kDefaultWerGate;
  double wer_split = kDefaultHighWerPercent;
};

EvalMatrix assemble_matrix(const std::vector<std::string>& paths, const std::string& lang_flag,
                           const ScriptRegistry& registry, Streams io) {
  struct Acc {
    std::vector<SfrResult> sfr;
    EditStats words;
    bool all_have_reference = true;
  };
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, Acc> acc;
  for (const auto& path : paths) {
    for (const auto& rec : read_corpus(path, io)) {
      if (!rec.utterance.model_id) {
        throw InputError(path + ": record '" + rec.utterance.id + "' has no 'model'");
      }
      const ScriptConfig& cfg = language_for(registry, rec, lang_flag);
      const auto key = std::make_pair(*rec.utterance.model_id, cfg.language_id);
      auto [it, inserted] = acc.try_emplace(key);
      if (inserted) order.push_back(key);
      it->second.sfr.push_back(sfr_utterance(rec.utterance, cfg));
      if (rec.utterance.reference) {
        it->second.words += word_edit_stats(rec.utterance, cfg.normalization);
      } else {
        it->second.all_have_reference = false;
      }
    }
  }
  EvalMatrix m;
  for (const auto& key : order) {
    const Acc& a = acc[key];
    EvalCell cell{key.first, key.second, std::nullopt, std::nullopt, true};
    if (auto mean = sfr_corpus(a.sfr).mean_sfr) cell.sfr_percent = *mean * 100.0;
    if (a.all_have_reference && a.words.reference_len > 0) cell.wer_percent = a.words.rate() * 100.0;
    cell.evaluated = cell.sfr_percent || cell.wer_percent;
    m.add(std::move(cell));
  }
  return m;
}

std::map<std::string, std::string> read_family_map(const std::string& path) {
  std::map<std::string, std::string> out;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw InputError(path + ":" + std::to_string(n) + ": expected 'model,family'");
    }
    std::string model = line.substr(0, comma);
    std::string family = line.substr(comma + 1);
    if (!family.empty() && family.back() == '\r') family.pop_back();
    if (model == "model" && family == "family") continue;
    out[model] = family;
  }
  return out;
}

struct PublishedFamily {
  double mean;
  double median;
  std::size_t collapsed;
  std::size_t evaluated;
};

std::map<std::string, PublishedFamily> parse_published(std::string_view text) {
  std::map<std::string, PublishedFamily> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.starts_with("family,")) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != 5) throw InputError("published summary: expected 5 fields in '" + line + "'");
    out[f[0]] = {std::stod(f[1]), std::stod(f[2]), std::stoul(f[3]), std::stoul(f[4])};
  }
  return out;
}

int cmd_report(const ReportOptions& opt, Streams io) {
  const int sources = (opt.builtin ? 1 : 0) + (opt.matrix.empty() ? 0 : 1) +
                      (opt.from_jsonl.empty() ? 0 : 1);
  if (sources != 1) throw UsageError("give exactly one of --builtin, --matrix, --from-jsonl");
  if (!(opt.threshold > 0.0 && opt.threshold < 100.0)) {
    throw UsageError("--threshold must lie in (0, 100)");
  }
  if (!(opt.gate > 0.0 && opt.gate < 1.0)) throw UsageError("--gate must lie in (0, 1)");

  const ScriptRegistry registry = registry_for(opt.common);
  check_lang_flag(registry, opt.lang);
  EvalMatrix m;
  if (opt.builtin) {
    m = builtin_results_matrix();
  } else if (!opt.matrix.empty()) {
    m = read_matrix_csv(opt.matrix);
  } else {
    m = assemble_matrix(opt.from_jsonl, opt.lang, registry, io);
  }

  const QuadrantBounds bounds{opt.threshold, opt.wer_split};
  const auto scatter = scatter_data(m, opt.threshold, bounds);
  if (!opt.scatter_out.empty()) {
    std::ofstream f(opt.scatter_out, std::ios::binary);
    if (!f) throw InputError("cannot write '" + opt.scatter_out + "'");
    f << scatter_csv(scatter);
  }
  if (!opt.csv_out.empty()) write_matrix_csv(m, opt.csv_out);

  const auto& fmt = opt.common.format;
  if (fmt == "csv") {
    io.out << format_matrix_csv(m);
    return kOk;
  }
  if (fmt == "scatter") {
    io.out << scatter_csv(scatter);
    return kOk;
  }

  const GatedReport gated = gated_report(m, opt.gate, opt.threshold);
  io.out << "SFR and WER (%)\n" << render_gated_text(m, gated) << '\n';
  if (m.evaluated_count() == 0) {
    io.out << "no evaluated cells\n";
    return kOk;
  }

  const CollapseReport collapse = classify_collapse(m, opt.threshold, opt.high);
  io.out << "Script collapse (SFR < " << fixed(opt.threshold, 1) << "%): "
         << collapse.collapsed_pairs.size() << " of " << collapse.n_evaluated << " evaluated pairs ("
         << fixed(collapse.proportion * 100.0, 1) << "%; 95% Wilson CI "
         << fixed(collapse.wilson_ci.first * 100.0, 1) << "-"
         << fixed(collapse.wilson_ci.second * 100.0, 1) << "%)\n";
  if (collapse.gap) {
    io.out << "highest collapsed SFR: " << fixed(collapse.gap->first, 1)
           << "%, lowest non-collapsed SFR: " << fixed(collapse.gap->second, 1) << "%\n";
  }
  if (collapse.insensitive_interval) {
    io.out << "threshold-insensitive interval: [" << fixed(collapse.insensitive_interval->first, 1)
           << "%, " << fixed(collapse.insensitive_interval->second, 1) << "%], gap "
           << fixed(collapse.insensitive_interval->second - collapse.insensitive_interval->first, 1)
           << " points\n";
  } else {
    io.out << "threshold-insensitive interval: empty\n";
  }
  io.out << "SFR distribution: " << collapse.bimodality.below << " below "
         << fixed(opt.threshold, 1) << "%, " << collapse.bimodality.intermediate
         << " intermediate, " << collapse.bimodality.above << " above " << fixed(opt.high, 1)
         << "%\n\n";

  std::vector<FamilySummaryRow> families;
  if (opt.families.empty()) {
    families = family_summary(
        m, [](std::string_view model) -> std::optional<std::string> { return default_family_of(model); },
        opt.threshold);
  } else {
    families = family_summary(m, read_family_map(opt.families), opt.threshold);
  }
  std::size_t width = 12;
  for (const auto& row : families) width = std::max(width, row.family.size());
  io.out << pad("Model family", width) << "  Mean SFR  Median SFR  Collapsed\n";
  for (const auto& row : families) {
    io.out << pad(row.family, width) << "  " << lpad(row.mean_sfr ? fixed(*row.mean_sfr, 1) : "---", 8)
           << "  " << lpad(row.median_sfr ? fixed(*row.median_sfr, 1) : "---", 10) << "  "
           << lpad(std::to_string(row.collapsed) + " / " + std::to_string(row.evaluated), 9) << '\n';
  }

  std::string published_text;
  if (!opt.published.empty()) {
    published_text = read_file(opt.published);
  } else if (opt.builtin) {
    published_text = std::string(embedded::published_family_summary());
  }
  if (!published_text.empty()) {
    const auto published = parse_published(published_text);
    std::vector<std::string> notes;
    for (const auto& row : families) {
      auto it = published.find(row.family);
      if (it == published.end()) continue;
      const PublishedFamily& p = it->second;
      auto compare = [&](const char* what, std::optional<double> got, double want) {
        if (!got || std::abs(round_half_away(*got, 1) - want) > 1e-9) {
          notes.push_back(row.family + " " + what + ": recomputed " + (got ? fixed(*got, 1) : "---") +
                          ", published " + fixed(want, 1));
        }
      };
      compare("mean", row.mean_sfr, p.mean);
      compare("median", row.median_sfr, p.median);
      if (row.collapsed != p.collapsed || row.evaluated != p.evaluated) {
        notes.push_back(row.family + " collapsed: recomputed " + std::to_string(row.collapsed) + "/" +
                        std::to_string(row.evaluated) + ", published " + std::to_string(p.collapsed) +
                        "/" + std::to_string(p.evaluated));
      }
    }
    io.out << '\n';
    if (notes.empty()) {
      io.out << "family summary matches the published values\n";
    } else {
      io.out << "discrepancies against the published family summary:\n";
      for (const auto& n : notes) io.out << "  " << n << '\n';
    }
  }
  return kOk;
}

// ---------------------------------------------------------------- audit

struct AuditCliOptions {
  CommonOptions common;
  std::string input = "-";
  std::string lang;
  std::size_t window = 100;
  double threshold = 0.8;
  std::optional<std::size_t> min_fill;
  bool no_timestamp = false;
  bool fail_on_alert = false;
};

int cmd_audit(const AuditCliOptions& opt, Streams io) {
  const ScriptRegistry registry = registry_for(opt.common);
  check_lang_flag(registry, opt.lang);
  AuditConfig cfg{opt.window, opt.threshold, opt.min_fill};
  try {
    validate(cfg);
  } catch (const InputError& e) {
    throw UsageError(e.what());
  }

  std::ifstream file;
  std::istream* in = &io.in;
  if (opt.input != "-") {
    file.open(opt.input, std::ios::binary);
    if (!file) throw InputError("cannot open '" + opt.input + "'");
    in = &file;
  }

  AuditState state;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(*in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    CorpusRecord rec;
    try {
      if (const auto bad = unicode::find_invalid_utf8(line); bad != std::string::npos) {
        throw InputError("invalid UTF-8 at byte " + std::to_string(bad) + " of the line");
      }
      rec = parse_jsonl_record(line, line_number);
    } catch (const InputError& e) {
      ++state.errors;
      io.err << "audit: skipping line " << line_number << ": " << e.what() << '\n';
      continue;
    }
    if (!opt.lang.empty()) rec.utterance.language_id = opt.lang;

    const AuditStepResult step = audit_step(state, rec.utterance, registry, cfg);
    if (step.error) {
      io.err << "audit: " << step.error->utterance_id << ": " << step.error->message << '\n';
      continue;
    }
    if (step.alert) {
      const AlertEvent& a = *step.alert;
      Json j;
      j["event"] = "alert";
      j["lang"] = a.language_id;
      j["window_mean"] = a.window_mean;
      j["window_size"] = a.window_size;
      j["window_non_null"] = a.window_non_null;
      j["threshold"] = cfg.alert_threshold;
      j["sequence"] = a.sequence;
      j["utterance_id"] = a.utterance_id;
      if (!opt.no_timestamp) j["timestamp"] = iso_timestamp();
      io.out << j.dump() << '\n';
      io.out.flush();
      io.err << "ALERT " << a.language_id << ": window SFR " << fixed(a.window_mean * 100.0, 1)
             << "% < " << fixed(cfg.alert_threshold * 100.0, 1) << "% after utterance "
             << a.utterance_id << " (#" << a.sequence << ")\n";
    }
  }
  io.err << "audit: processed " << state.processed << ", null " << state.null_count << ", alerts "
         << state.alerts_fired << ", errors " << state.errors << '\n';
  return opt.fail_on_alert && state.alerts_fired > 0 ? kCheckFailed : kOk;
}

// ---------------------------------------------------------------- validate

struct ValidateOptions {
  CommonOptions common;
  std::string pashto_predictions;
};

int cmd_validate(const ValidateOptions& opt, Streams io) {
  const ScriptRegistry registry = registry_for(opt.common);
  ValidationReport report = validate_known_examples(registry, builtin_known_examples());
  if (!opt.pashto_predictions.empty()) {
    const auto predictions = validate_predictions(registry, read_jsonl(std::filesystem::path(opt.pashto_predictions)));
    report.checks.insert(report.checks.end(), predictions.checks.begin(), predictions.checks.end());
  }
  for (const auto& c : report.checks) {
    io.out << (c.passed ? "PASS" : "FAIL") << "  " << pad(c.language_id, 3) << "  " << pad(c.kind, 11)
           << "  SFR " << lpad(pct(c.actual), 5) << "%  " << c.subject;
    if (!c.detail.empty()) io.out << "  (" << c.detail << ")";
    io.out << '\n';
  }
  io.out << report.checks.size() - report.failures() << " of " << report.checks.size()
         << " checks passed\n";
  return report.passed() ? kOk : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  Streams io{in, out, err};
  CLI::App app{"Script Fidelity Rate toolkit: script-collapse metrics for ASR output", "sfr"};
  app.require_subcommand(1);

  ScoreOptions score;
  auto* score_cmd = app.add_subcommand("score", "Per-utterance and corpus SFR for a JSONL corpus");
  score_cmd->add_option("corpus", score.corpus, "Corpus JSONL ('-' for stdin)")->required();
  score_cmd->add_option("--lang", score.lang, "Target language (default: each record's 'lang')");
  add_common(score_cmd, score.common, {"text", "csv", "jsonl"});

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "SFR, WER and CER for a corpus with references");
  eval_cmd->add_option("corpus", eval.corpus, "Corpus JSONL ('-' for stdin)")->required();
  eval_cmd->add_option("--lang", eval.lang, "Target language (default: each record's 'lang')");
  add_common(eval_cmd, eval.common, {"text", "csv", "jsonl"});

  TaxonomyCliOptions tax;
  auto* tax_cmd = app.add_subcommand("taxonomy", "Dominant output script table");
  tax_cmd->add_option("corpus", tax.corpus, "Corpus JSONL ('-' for stdin)")->required();
  tax_cmd->add_option("--lang", tax.lang, "Target language (default: each record's 'lang')");
  tax_cmd->add_option("--group-by", tax.group_by, "Row grouping")
      ->check(CLI::IsMember({"model", "lang", "none"}))
      ->capture_default_str();
  tax_cmd->add_option("--dominance", tax.taxonomy.dominance, "Share needed to call a script dominant")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  tax_cmd->add_option("--loop-max-ngram", tax.taxonomy.looping.max_ngram, "Longest repeated n-gram")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  tax_cmd->add_option("--loop-coverage", tax.taxonomy.looping.min_coverage,
                      "Looping flag needs coverage above this")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  tax_cmd->add_option("--loop-min-tokens", tax.taxonomy.looping.min_tokens,
                      "Looping flag needs at least this many tokens")
      ->capture_default_str();
  add_common(tax_cmd, tax.common, {"text", "csv", "jsonl"});

  ReportOptions report;
  auto* report_cmd = app.add_subcommand("report", "Collapse analysis over a model x language matrix");
  report_cmd->add_option("--matrix", report.matrix, "Matrix CSV (model,language,sfr,wer)")
      ->check(CLI::ExistingFile);
  report_cmd->add_flag("--builtin", report.builtin, "Use the shipped results matrix");
  report_cmd->add_option("--from-jsonl", report.from_jsonl,
                         "Assemble the matrix from per-utterance JSONL files");
  report_cmd->add_option("--lang", report.lang, "Language for records without 'lang'");
  report_cmd->add_option("--threshold", report.threshold, "Collapse threshold, SFR percent")
      ->capture_default_str();
  report_cmd->add_option("--high", report.high, "Upper bimodality boundary, SFR percent")
      ->capture_default_str();
  report_cmd->add_option("--gate", report.gate, "SFR ratio below which WER is flagged")
      ->capture_default_str();
  report_cmd->add_option("--wer-split", report.wer_split, "WER percent splitting scatter quadrants")
      ->capture_default_str();
  report_cmd->add_option("--families", report.families, "CSV mapping model,family")
      ->check(CLI::ExistingFile);
  report_cmd->add_option("--published", report.published,
                         "CSV family,mean,median,collapsed,evaluated to compare against")
      ->check(CLI::ExistingFile);
  report_cmd->add_option("--scatter-out", report.scatter_out, "Write scatter CSV here");
  report_cmd->add_option("--csv-out", report.csv_out, "Write the matrix CSV here");
  add_common(report_cmd, report.common, {"text", "csv", "scatter"});

  AuditCliOptions audit;
  auto* audit_cmd = app.add_subcommand("audit", "Reference-free streaming SFR audit");
  audit_cmd->add_option("--input", audit.input, "JSONL stream ('-' for stdin)")->capture_default_str();
  audit_cmd->add_option("--lang", audit.lang, "Override each record's 'lang'");
  audit_cmd->add_option("--window", audit.window, "Window size in utterances")->capture_default_str();
  audit_cmd->add_option("--threshold", audit.threshold, "Alert when window SFR drops below this")
      ->capture_default_str();
  audit_cmd->add_option("--min-fill", audit.min_fill,
                        "Non-null results needed before alerts arm (default: window)");
  audit_cmd->add_flag("--no-timestamp", audit.no_timestamp, "Omit timestamps from alert events");
  audit_cmd->add_flag("--fail-on-alert", audit.fail_on_alert, "Exit 1 if any alert fired");
  add_common(audit_cmd, audit.common, {"jsonl"});
  audit.common.format = "jsonl";

  ValidateOptions validate_opts;
  auto* validate_cmd = app.add_subcommand("validate", "Check script configs against known examples");
  validate_cmd->add_option("--pashto-predictions", validate_opts.pashto_predictions,
                           "Pashto predictions JSONL; Whisper rows must score below 1% SFR")
      ->check(CLI::ExistingFile);
  add_common(validate_cmd, validate_opts.common, {"text"});

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (score_cmd->parsed()) return cmd_score(score, io);
    if (eval_cmd->parsed()) return cmd_eval(eval, io);
    if (tax_cmd->parsed()) return cmd_taxonomy(tax, io);
    if (report_cmd->parsed()) return cmd_report(report, io);
    if (audit_cmd->parsed()) return cmd_audit(audit, io);
    if (validate_cmd->parsed()) return cmd_validate(validate_opts, io);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kInputFormat;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kInputFormat;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kInputFormat;
  }
  return kUsage;
}

}  // namespace sfr::cli
