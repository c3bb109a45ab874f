#include "exotendon/study_table.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "exotendon/errors.hpp"

namespace exo {

void StudyTable::add_row(std::vector<double> row) {
  if (row.size() != columns_.size()) {
    throw std::invalid_argument("row width " + std::to_string(row.size()) +
                                " != column count " + std::to_string(columns_.size()));
  }
  rows_.push_back(std::move(row));
}

void StudyTable::set_meta(const std::string& key, const std::string& value) {
  for (auto& kv : metadata_) {
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  }
  metadata_.emplace_back(key, value);
}

const std::string* StudyTable::meta(const std::string& key) const {
  for (const auto& kv : metadata_) {
    if (kv.first == key) return &kv.second;
  }
  return nullptr;
}

std::size_t StudyTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  throw std::out_of_range("no column named " + name);
}

std::vector<double> StudyTable::column(const std::string& name) const {
  const std::size_t c = column_index(name);
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r[c]);
  return out;
}

double StudyTable::at(std::size_t row, const std::string& name) const {
  return rows_.at(row)[column_index(name)];
}

std::string format_value(double v) {
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string to_csv(const StudyTable& table) {
  std::string out;
  for (const auto& [k, v] : table.metadata()) out += "# " + k + "=" + v + "\n";
  out += "# units=";
  for (std::size_t i = 0; i < table.num_cols(); ++i) {
    if (i) out += ',';
    out += table.columns()[i].unit;
  }
  out += '\n';
  for (std::size_t i = 0; i < table.num_cols(); ++i) {
    if (i) out += ',';
    out += table.columns()[i].name;
  }
  out += '\n';
  for (const auto& row : table.rows()) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_value(row[i]);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

[[noreturn]] void csv_error(int line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "csv", what, line);
}

}  // namespace

StudyTable parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> units;
  bool have_units = false;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      if (!body.empty() && body[0] == ' ') body.erase(0, 1);
      const auto eq = body.find('=');
      if (eq == std::string::npos) csv_error(lineno, "metadata line without '='");
      std::string key = body.substr(0, eq);
      std::string value = body.substr(eq + 1);
      if (key == "units") {
        units = split_commas(value);
        have_units = true;
      } else {
        meta.emplace_back(std::move(key), std::move(value));
      }
      continue;
    }
    header = split_commas(line);
    break;
  }
  if (header.empty()) csv_error(lineno, "missing header row");
  if (!have_units) units.assign(header.size(), "");
  if (units.size() != header.size()) csv_error(lineno, "units count does not match header");

  std::vector<Column> cols;
  for (std::size_t i = 0; i < header.size(); ++i) cols.push_back({header[i], units[i]});
  StudyTable table(std::move(cols));
  for (const auto& [k, v] : meta) table.set_meta(k, v);

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != header.size()) csv_error(lineno, "row width mismatch");
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) {
      char* end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (f.empty() || end != f.c_str() + f.size()) csv_error(lineno, "bad number '" + f + "'");
      row.push_back(v);
    }
    table.add_row(std::move(row));
  }
  return table;
}

std::size_t write_file_atomic(const std::filesystem::path& destination, const std::string& bytes) {
  std::filesystem::path tmp = destination;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::IoFailure, destination.string(),
                  "cannot open " + tmp.string() + " for writing");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::IoFailure, destination.string(), "write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, destination, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoFailure, destination.string(),
                "cannot rename into " + destination.string());
  }
  return bytes.size();
}

std::size_t export_csv(const StudyTable& table, const std::filesystem::path& destination) {
  return write_file_atomic(destination, to_csv(table));
}

StudyTable import_csv(const std::filesystem::path& source) {
  std::ifstream in(source, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, source.string(), "cannot open " + source.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace exo
