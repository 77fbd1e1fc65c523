#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "sfr/analysis.hpp"
#include "sfr/utterance.hpp"

namespace sfr {

// One JSONL line: {"id", "lang", "hypothesis", "reference", "model"} plus
// optional precomputed "sfr"/"wer". Other keys ride along in `extra` so a
// read/write cycle keeps them.
struct CorpusRecord {
  Utterance utterance;
  std::optional<double> sfr;
  std::optional<double> wer;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  bool operator==(const CorpusRecord&) const = default;
};

// Parses one JSONL line (1-based line number for ids and messages). Text is
// kept byte-exact; no normalization happens here.
CorpusRecord parse_jsonl_record(std::string_view line, std::size_t line_number);
std::string format_jsonl_record(const CorpusRecord& record);

// Throws InputError naming the line (or byte offset, for bad UTF-8).
std::vector<CorpusRecord> read_jsonl(std::istream& in, std::string_view source = "<stream>");
std::vector<CorpusRecord> read_jsonl(const std::filesystem::path& path);
void write_jsonl(std::ostream& out, const std::vector<CorpusRecord>& records);

// Header "model,language,sfr,wer"; '#' lines before it are comments. Empty
// sfr and wer fields mark an unevaluated cell.
EvalMatrix parse_matrix_csv(std::string_view text, std::string_view source = "<matrix>");
EvalMatrix read_matrix_csv(const std::filesystem::path& path);
std::string format_matrix_csv(const EvalMatrix& m);
void write_matrix_csv(const EvalMatrix& m, const std::filesystem::path& path);

// The shipped results matrix (54 cells, 53 evaluated).
EvalMatrix builtin_results_matrix();

std::string read_file(const std::filesystem::path& path);

}  // namespace sfr
