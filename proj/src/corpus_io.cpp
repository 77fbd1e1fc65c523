#include "sfr/corpus_io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "sfr/embedded.hpp"
#include "sfr/error.hpp"
#include "sfr/unicode.hpp"

namespace sfr {
namespace {

using Json = nlohmann::ordered_json;

std::optional<std::string> optional_string(const Json& obj, const char* key,
                                           const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw InputError(where + ": field '" + key + "' must be a string");
  return it->get<std::string>();
}

std::optional<double> optional_number(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw InputError(where + ": field '" + key + "' must be a number");
  return it->get<double>();
}

std::string format_number(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::optional<double> parse_number_field(std::string_view field, const std::string& where) {
  if (field.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw InputError(where + ": not a number: '" + std::string(field) + "'");
  }
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

}  // namespace

CorpusRecord parse_jsonl_record(std::string_view line, std::size_t line_number) {
  const std::string where = "line " + std::to_string(line_number);
  Json obj;
  try {
    obj = Json::parse(line.begin(), line.end());
  } catch (const Json::parse_error& e) {
    throw InputError(where + ": malformed JSON: " + e.what());
  }
  if (!obj.is_object()) throw InputError(where + ": expected a JSON object");

  CorpusRecord rec;
  auto id = optional_string(obj, "id", where);
  if (id && id->empty()) throw InputError(where + ": empty 'id'");
  rec.utterance.id = id.value_or("line-" + std::to_string(line_number));

  auto hypothesis = optional_string(obj, "hypothesis", where);
  if (!hypothesis) {
    throw InputError(where + " (id '" + rec.utterance.id + "'): missing 'hypothesis'");
  }
  rec.utterance.hypothesis = std::move(*hypothesis);
  rec.utterance.language_id = optional_string(obj, "lang", where).value_or("");
  rec.utterance.reference = optional_string(obj, "reference", where);
  rec.utterance.model_id = optional_string(obj, "model", where);
  rec.sfr = optional_number(obj, "sfr", where);
  rec.wer = optional_number(obj, "wer", where);

  for (const auto& [key, value] : obj.items()) {
    static const std::set<std::string> kKnown = {"id", "lang", "hypothesis", "reference",
                                                 "model", "sfr", "wer"};
    if (!kKnown.contains(key)) rec.extra[key] = value;
  }
  return rec;
}

std::string format_jsonl_record(const CorpusRecord& record) {
  Json obj = Json::object();
  const auto& u = record.utterance;
  obj["id"] = u.id;
  if (!u.language_id.empty()) obj["lang"] = u.language_id;
  obj["hypothesis"] = u.hypothesis;
  if (u.reference) obj["reference"] = *u.reference;
  if (u.model_id) obj["model"] = *u.model_id;
  if (record.sfr) obj["sfr"] = *record.sfr;
  if (record.wer) obj["wer"] = *record.wer;
  for (const auto& [key, value] : record.extra.items()) obj[key] = value;
  return obj.dump(-1, ' ', false, Json::error_handler_t::strict);
}

std::vector<CorpusRecord> read_jsonl(std::istream& in, std::string_view source) {
  std::vector<CorpusRecord> records;
  std::string line;
  std::size_t line_number = 0;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::size_t bad = unicode::find_invalid_utf8(line);
    if (bad != std::string::npos) {
      throw InputError(std::string(source) + ": invalid UTF-8 at byte offset " +
                       std::to_string(offset + bad) + " (line " + std::to_string(line_number) + ")");
    }
    offset += line.size() + 1;
    if (is_blank(line)) continue;
    try {
      records.push_back(parse_jsonl_record(line, line_number));
    } catch (const InputError& e) {
      throw InputError(std::string(source) + ": " + e.what());
    }
  }
  return records;
}

std::vector<CorpusRecord> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return read_jsonl(in, path.string());
}

void write_jsonl(std::ostream& out, const std::vector<CorpusRecord>& records) {
  for (const auto& r : records) out << format_jsonl_record(r) << '\n';
}

EvalMatrix parse_matrix_csv(std::string_view text, std::string_view source) {
  EvalMatrix m;
  bool header_seen = false;
  std::size_t line_number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_number;
    const std::string where = std::string(source) + ":" + std::to_string(line_number);

    if (is_blank(line)) continue;
    if (!header_seen) {
      if (trim(line).starts_with('#')) continue;
      const auto fields = split_commas(line);
      if (fields.size() != 4 || fields[0] != "model" || fields[1] != "language" ||
          fields[2] != "sfr" || fields[3] != "wer") {
        throw InputError(where + ": expected header 'model,language,sfr,wer'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = split_commas(line);
    if (fields.size() != 4) throw InputError(where + ": expected 4 fields");
    if (fields[0].empty() || fields[1].empty()) throw InputError(where + ": empty model or language");
    EvalCell cell;
    cell.model_id = std::string(fields[0]);
    cell.language_id = std::string(fields[1]);
    cell.sfr_percent = parse_number_field(fields[2], where);
    cell.wer_percent = parse_number_field(fields[3], where);
    cell.evaluated = cell.sfr_percent || cell.wer_percent;
    try {
      m.add(std::move(cell));
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  if (!header_seen) throw InputError(std::string(source) + ": missing header 'model,language,sfr,wer'");
  return m;
}

EvalMatrix read_matrix_csv(const std::filesystem::path& path) {
  return parse_matrix_csv(read_file(path), path.string());
}

std::string format_matrix_csv(const EvalMatrix& m) {
  std::ostringstream os;
  os << "model,language,sfr,wer\n";
  for (const auto& c : m.cells()) {
    os << c.model_id << ',' << c.language_id << ','
       << (c.sfr_percent ? format_number(*c.sfr_percent) : "") << ','
       << (c.wer_percent ? format_number(*c.wer_percent) : "") << '\n';
  }
  return os.str();
}

void write_matrix_csv(const EvalMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << format_matrix_csv(m);
}

EvalMatrix builtin_results_matrix() {
  return parse_matrix_csv(embedded::results_matrix(), "builtin:table3.csv");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace sfr
