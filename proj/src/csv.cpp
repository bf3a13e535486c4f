#include "infmmala/csv.hpp"

#include <charconv>
#include <system_error>

#include "infmmala/errors.hpp"

namespace infmmala::csv {

std::string format(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Writer::Writer(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
  if (header.empty()) throw IoError(path.string() + ": refusing to write a header-less table");
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError(path.string() + ": cannot open for writing");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
  check();
}

Writer::~Writer() {
  try {
    close();
  } catch (const IoError&) {
    // Destructor path: the error is unreportable here; explicit close()
    // is the checked way out.
  }
}

void Writer::check() const {
  if (!out_) throw IoError(path_.string() + ": write failed");
}

Writer& Writer::cell(std::string_view v) {
  if (cells_in_row_ >= columns_) {
    throw IoError(path_.string() + ": row has more cells than the header");
  }
  if (cells_in_row_ > 0) out_ << ',';
  out_ << v;
  ++cells_in_row_;
  check();
  return *this;
}

Writer& Writer::cell(double v) { return cell(std::string_view(format(v))); }

Writer& Writer::cell(long long v) { return cell(std::string_view(std::to_string(v))); }

void Writer::end_row() {
  if (cells_in_row_ != columns_) {
    throw IoError(path_.string() + ": row has " + std::to_string(cells_in_row_) +
                  " cells for " + std::to_string(columns_) + " columns");
  }
  out_ << '\n';
  cells_in_row_ = 0;
  check();
}

void Writer::close() {
  if (closed_) return;
  closed_ = true;
  if (cells_in_row_ != 0) throw IoError(path_.string() + ": closed mid-row");
  out_.flush();
  check();
  out_.close();
}

std::size_t Table::col(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  throw IoError(path_.string() + ": no column named '" + std::string(name) + "'");
}

const std::string& Table::str(std::size_t row, std::size_t col) const {
  if (row >= rows_.size() || col >= header_.size()) {
    throw IoError(path_.string() + ": cell (" + std::to_string(row) + ", " + std::to_string(col) +
                  ") out of range");
  }
  return rows_[row][col];
}

double Table::num(std::size_t row, std::size_t col) const {
  const std::string& s = str(row, col);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw IoError(path_.string() + ": cell '" + s + "' in row " + std::to_string(row) +
                  " is not a number");
  }
  return v;
}

std::vector<double> Table::column(std::string_view name) const {
  const std::size_t c = col(name);
  std::vector<double> out(rows_.size());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = num(r, c);
  return out;
}

namespace {

std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  Table table;
  table.path_ = path;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      throw IoError(path.string() + ": line " + std::to_string(lineno) + ": empty record");
    }
    std::vector<std::string> fields = split_record(line);
    if (lineno == 1) {
      table.header_ = std::move(fields);
    } else if (fields.size() != table.header_.size()) {
      throw IoError(path.string() + ": line " + std::to_string(lineno) + ": got " +
                    std::to_string(fields.size()) + " fields, header has " +
                    std::to_string(table.header_.size()));
    } else {
      table.rows_.push_back(std::move(fields));
    }
  }
  if (in.bad()) throw IoError(path.string() + ": read failed");
  if (lineno == 0) throw IoError(path.string() + ": empty file");
  return table;
}

}  // namespace infmmala::csv
