#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "csdas/types.hpp"

namespace csdas {

/// Shortest round-trip decimal form; identical bytes for identical doubles,
/// which is what keeps repeated runs byte-comparable.
std::string format_double(double v);

/// Line-oriented CSV writer with atomic publish: writes to "<path>.tmp" and
/// renames on close so readers never observe partial files.
class CsvWriter {
 public:
  explicit CsvWriter(std::filesystem::path path);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void write_row(const std::vector<std::string>& fields);
  CsvWriter& begin_row();
  CsvWriter& field(const std::string& v);
  CsvWriter& field(const char* v) { return field(std::string(v)); }
  CsvWriter& field(double v) { return field(format_double(v)); }
  CsvWriter& field(int v) { return field(std::to_string(v)); }
  CsvWriter& field(long v) { return field(std::to_string(v)); }
  void end_row();
  void close();

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::ofstream out_;
  bool first_field_ = true;
  bool open_ = true;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; FormatError if absent.
  std::size_t column(const std::string& name) const;
};

/// Parses a comma-separated file (no quoting; none of the exports need it).
CsvTable read_csv(const std::filesystem::path& path);

double parse_double(const std::string& s, const std::string& context);
long parse_long(const std::string& s, const std::string& context);

}  // namespace csdas
