#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace infmmala::csv {

// Shortest decimal form that parses back to exactly the same double
// (std::to_chars); "inf"/"nan" spellings round-trip through the reader too.
std::string format(double v);

// Streaming writer. Cells are appended left to right; end_row() terminates
// the line. Stream failures surface as IoError on write or close.
class Writer {
 public:
  Writer(const std::filesystem::path& path, const std::vector<std::string>& header);
  ~Writer();

  Writer(const Writer&) = delete;
  Writer& operator=(const Writer&) = delete;

  Writer& cell(double v);
  Writer& cell(long long v);
  Writer& cell(int v) { return cell(static_cast<long long>(v)); }
  Writer& cell(bool v) { return cell(static_cast<long long>(v ? 1 : 0)); }
  Writer& cell(std::string_view v);
  void end_row();

  // Flushes and verifies the stream; called by the destructor, but callers
  // that need the error should close() explicitly (destructors swallow it).
  void close();

 private:
  void check() const;

  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_ = 0;
  std::size_t cells_in_row_ = 0;
  bool closed_ = false;
};

// Fully parsed CSV held as strings, with typed accessors.
class Table {
 public:
  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  std::size_t col(std::string_view name) const;  // throws IoError when absent
  const std::string& str(std::size_t row, std::size_t col) const;
  double num(std::size_t row, std::size_t col) const;
  double num(std::size_t row, std::string_view name) const { return num(row, col(name)); }
  std::vector<double> column(std::string_view name) const;

 private:
  friend Table read_table(const std::filesystem::path&);
  std::filesystem::path path_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Strict reader: one header line, every record with the same field count,
// separator ',', line ends '\n' or '\r\n', no quoting (no emitted file needs
// it). Violations throw IoError naming the file and line.
Table read_table(const std::filesystem::path& path);

}  // namespace infmmala::csv
