#include "csdas/csv.hpp"

#include <sstream>

namespace csdas {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::filesystem::path path)
    : path_(std::move(path)), tmp_(path_.string() + ".tmp"), out_(tmp_) {
  if (!out_) {
    throw FormatError("cannot open for writing: " + tmp_.string());
  }
}

CsvWriter::~CsvWriter() {
  try {
    close();
  } catch (...) {
    // destructor must not throw; close() explicitly to observe errors
  }
}

void CsvWriter::write_row(const std::vector<std::string>& fields) {
  begin_row();
  for (const auto& f : fields) field(f);
  end_row();
}

CsvWriter& CsvWriter::begin_row() {
  first_field_ = true;
  return *this;
}

CsvWriter& CsvWriter::field(const std::string& v) {
  if (!first_field_) out_ << ',';
  first_field_ = false;
  out_ << v;
  return *this;
}

void CsvWriter::end_row() { out_ << '\n'; }

void CsvWriter::close() {
  if (!open_) return;
  open_ = false;
  out_.flush();
  if (!out_) {
    throw FormatError("write failed: " + tmp_.string());
  }
  out_.close();
  std::filesystem::rename(tmp_, path_);
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw FormatError("csv: missing column '" + name + "'");
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw FormatError("cannot open: " + path.string());
  }
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(',', start);
      if (pos == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != table.header.size()) {
        throw FormatError("csv: ragged row in " + path.string());
      }
      table.rows.push_back(std::move(fields));
    }
  }
  return table;
}

double parse_double(const std::string& s, const std::string& context) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw FormatError(context + ": bad number '" + s + "'");
  }
  return v;
}

long parse_long(const std::string& s, const std::string& context) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw FormatError(context + ": bad integer '" + s + "'");
  }
  return v;
}

}  // namespace csdas
