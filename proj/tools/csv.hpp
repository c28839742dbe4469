#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace mgritsl::tools {

/// Locale-independent number formatting: shortest round-trip form for
/// config values, 10 significant digits in scientific notation for CSV data.
std::string format_exact(double v);
std::string format_sci(double v);

/// CSV table with '#'-prefixed metadata lines ahead of the header row.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> columns);

  /// Emits every line of `text` as a metadata comment. Must precede rows.
  void metadata(std::string_view text);

  CsvWriter& cell(double v);
  CsvWriter& cell(int v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(bool v);
  CsvWriter& cell(std::string_view v);
  void end_row();

 private:
  void header_once();

  std::ostream& out_;
  std::vector<std::string> columns_;
  std::vector<std::string> row_;
  bool header_written_ = false;
};

}  // namespace mgritsl::tools
