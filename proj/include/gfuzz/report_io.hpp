#ifndef GFUZZ_REPORT_IO_HPP
#define GFUZZ_REPORT_IO_HPP

#include <fstream>
#include <string>

#include "gfuzz/campaign.hpp"

namespace gfuzz {

// Campaign report file: one self-describing JSON object per line, flushed as
// produced so an interrupted run still leaves a parseable prefix.
//
//   {"kind":"generation","gen":..,"best_structure":..,"median_structure":..,
//    "exceptional":..,"elapsed_ms":..}
//   {"kind":"exception","gen":..,"type":..,"input_path":..,"elapsed_ms":..}
//   {"kind":"summary","generations":..,"inputs_generated":..,
//    "inputs_executed":..,"unique_exception_types":..}
class ReportWriter {
 public:
  explicit ReportWriter(const std::string& path);

  void generation(const GenerationRecord& rec);
  void exception(const ExceptionEvent& event, const std::string& input_path);
  void summary(const CampaignSummary& s);
  // Free-form record, used by bench for its per-run and summary lines.
  void line(const std::string& json_line);

 private:
  std::ofstream out_;
};

std::string generation_line(const GenerationRecord& rec);
std::string exception_line(const ExceptionEvent& event, const std::string& input_path);
std::string summary_line(const CampaignSummary& s);

// exceptions/e<ordinal>_<type>.input with the type sanitized to [A-Za-z0-9._-]
std::string archive_file_name(size_t ordinal, const std::string& type);

}  // namespace gfuzz

#endif
