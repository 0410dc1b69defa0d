#include "gfuzz/report_io.hpp"

#include <json.hpp>

namespace gfuzz {

using ordered_json = nlohmann::ordered_json;

std::string generation_line(const GenerationRecord& rec) {
  ordered_json j;
  j["kind"] = "generation";
  j["gen"] = rec.gen;
  j["best_structure"] = rec.best_structure;
  j["median_structure"] = rec.median_structure;
  j["exceptional"] = rec.exceptional;
  j["elapsed_ms"] = rec.elapsed_ms;
  return j.dump();
}

std::string exception_line(const ExceptionEvent& event, const std::string& input_path) {
  ordered_json j;
  j["kind"] = "exception";
  j["gen"] = event.gen;
  j["type"] = event.type;
  j["input_path"] = input_path;
  j["elapsed_ms"] = event.elapsed_ms;
  return j.dump();
}

std::string summary_line(const CampaignSummary& s) {
  ordered_json j;
  j["kind"] = "summary";
  j["generations"] = s.generations;
  j["inputs_generated"] = s.inputs_generated;
  j["inputs_executed"] = s.inputs_executed;
  j["unique_exception_types"] = s.unique_exception_types;
  return j.dump();
}

std::string archive_file_name(size_t ordinal, const std::string& type) {
  std::string safe;
  for (char c : type)
    safe.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' ||
                           c == '-'
                       ? c
                       : '_');
  if (safe.empty()) safe = "unknown";
  return "exceptions/e" + std::to_string(ordinal) + "_" + safe + ".input";
}

ReportWriter::ReportWriter(const std::string& path) : out_(path, std::ios::trunc) {
  if (!out_) throw std::runtime_error("cannot open report file '" + path + "'");
}

void ReportWriter::line(const std::string& json_line) {
  out_ << json_line << '\n';
  out_.flush();
}

void ReportWriter::generation(const GenerationRecord& rec) { line(generation_line(rec)); }

void ReportWriter::exception(const ExceptionEvent& event, const std::string& input_path) {
  line(exception_line(event, input_path));
}

void ReportWriter::summary(const CampaignSummary& s) { line(summary_line(s)); }

}  // namespace gfuzz
