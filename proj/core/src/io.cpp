#include "scramble/io.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "scramble/errors.hpp"

namespace scramble {

namespace {

bool unsafe_cell(const std::string& s) {
  return s.find_first_of(",\r\n") != std::string::npos || (!s.empty() && s.front() == '#');
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

void DataTable::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) {
    throw DomainError("row has " + std::to_string(row.size()) + " cells, table has " +
                      std::to_string(columns.size()) + " columns");
  }
  rows.push_back(std::move(row));
}

std::size_t DataTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw DomainError("table has no column '" + name + "'");
}

std::vector<double> DataTable::numeric_column(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(parse_double(r[c]));
  return out;
}

void DataTable::validate() const {
  if (columns.empty()) throw DomainError("table has no columns");
  for (const auto& c : columns)
    if (c.empty() || unsafe_cell(c)) throw DomainError("invalid column name '" + c + "'");
  for (const auto& r : rows) {
    if (r.size() != columns.size()) throw DomainError("ragged table row");
    for (const auto& cell : r)
      if (unsafe_cell(cell)) throw DomainError("cell '" + cell + "' cannot be written as CSV");
  }
  for (const auto& [k, v] : metadata) {
    if (k.empty() || k.find_first_of(":\r\n") != std::string::npos)
      throw DomainError("invalid metadata key '" + k + "'");
    if (v.find_first_of("\r\n") != std::string::npos)
      throw DomainError("metadata value for '" + k + "' spans lines");
  }
}

DataTable table_from_record(const TimeSeriesRecord& rec) {
  rec.validate();
  DataTable t;
  t.columns = {"t", rec.label.empty() ? std::string("value") : rec.label};
  t.metadata = rec.metadata;
  t.rows.reserve(rec.size());
  for (std::size_t i = 0; i < rec.size(); ++i)
    t.rows.push_back({format_double(rec.times[i]), format_double(rec.values[i])});
  return t;
}

TimeSeriesRecord record_from_table(const DataTable& table) {
  if (table.columns.size() != 2) throw DomainError("a time series table has exactly two columns");
  TimeSeriesRecord r;
  r.label = table.columns[1];
  r.metadata = table.metadata;
  r.times = table.numeric_column(table.columns[0]);
  r.values = table.numeric_column(table.columns[1]);
  return r;
}

std::string to_csv(const DataTable& table) {
  table.validate();
  std::string out;
  for (const auto& [k, v] : table.metadata) out += "# " + k + ": " + v + "\n";
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(table.columns);
  for (const auto& r : table.rows) line(r);
  return out;
}

DataTable parse_csv(std::string_view text) {
  DataTable t;
  bool header = false;
  std::size_t pos = 0, lineno = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (header) throw DomainError("metadata line after the header at line " + std::to_string(lineno));
      const auto body = trim(line.substr(1));
      const auto colon = body.find(':');
      if (colon == std::string_view::npos)
        throw DomainError("metadata line without ':' at line " + std::to_string(lineno));
      t.metadata[std::string(trim(body.substr(0, colon)))] = std::string(trim(body.substr(colon + 1)));
      continue;
    }
    auto cells = split_commas(line);
    if (!header) {
      t.columns = std::move(cells);
      header = true;
    } else if (cells.size() != t.columns.size()) {
      throw DomainError("line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                        " cells, expected " + std::to_string(t.columns.size()));
    } else {
      t.rows.push_back(std::move(cells));
    }
  }
  if (!header) throw DomainError("CSV has no header row");
  return t;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const auto tag = std::to_string(::getpid()) + "." +
                   std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  fs::path tmp = path;
  tmp += ".tmp." + tag;
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp.string() + " for writing");
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot move output into place at " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

double parse_double(std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc() || ptr != last)
    throw DomainError("'" + std::string(text) + "' is not a number");
  return v;
}

long long parse_integer(std::string_view text) {
  text = trim(text);
  long long v = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc() || ptr != last)
    throw DomainError("'" + std::string(text) + "' is not an integer");
  return v;
}

}  // namespace scramble
