#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace polx {

/// CSV with a header row, '.' decimals, 17 significant digits and '\n'
/// line endings.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(long v);
  CsvWriter& operator<<(int v) { return *this << static_cast<long>(v); }
  CsvWriter& operator<<(const std::string& v);
  void end_row();

 private:
  void sep();
  std::ofstream out_;
  size_t columns_ = 0;
  size_t in_row_ = 0;
};

std::string format_double(double v);

/// Writes text to `path`, creating parent directories.
void write_text(const std::string& path, const std::string& text);
void ensure_dir(const std::string& dir);

}  // namespace polx
