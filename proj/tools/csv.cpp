#include "csv.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mgritsl::tools {
namespace {

std::string chars(double v, std::chars_format fmt, int precision) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = precision < 0 ? std::to_chars(buf, buf + sizeof buf, v)
                               : std::to_chars(buf, buf + sizeof buf, v, fmt, precision);
  return {buf, r.ptr};
}

}  // namespace

std::string format_exact(double v) { return chars(v, std::chars_format::general, -1); }
std::string format_sci(double v) { return chars(v, std::chars_format::scientific, 9); }

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> columns)
    : out_(out), columns_(std::move(columns)) {}

void CsvWriter::metadata(std::string_view text) {
  if (header_written_) throw std::logic_error("CSV metadata after the header");
  std::istringstream lines{std::string(text)};
  for (std::string line; std::getline(lines, line);) out_ << "# " << line << '\n';
}

void CsvWriter::header_once() {
  if (header_written_) return;
  for (std::size_t i = 0; i < columns_.size(); ++i) out_ << (i ? "," : "") << columns_[i];
  out_ << '\n';
  header_written_ = true;
}

CsvWriter& CsvWriter::cell(double v) {
  row_.push_back(format_sci(v));
  return *this;
}

CsvWriter& CsvWriter::cell(int v) { return cell(static_cast<long long>(v)); }

CsvWriter& CsvWriter::cell(long long v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  row_.emplace_back(buf, r.ptr);
  return *this;
}

CsvWriter& CsvWriter::cell(bool v) {
  row_.emplace_back(v ? "1" : "0");
  return *this;
}

CsvWriter& CsvWriter::cell(std::string_view v) {
  row_.emplace_back(v);
  return *this;
}

void CsvWriter::end_row() {
  if (row_.size() != columns_.size()) {
    throw std::logic_error("CSV row has " + std::to_string(row_.size()) + " cells, expected " +
                           std::to_string(columns_.size()));
  }
  header_once();
  for (std::size_t i = 0; i < row_.size(); ++i) out_ << (i ? "," : "") << row_[i];
  out_ << '\n';
  row_.clear();
}

}  // namespace mgritsl::tools
