#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace blq {

// Shortest round-trip decimal form (locale independent).
std::string format_double(double x);

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);  // IO_ERROR if it cannot be opened
  void header(const std::vector<std::string>& names);
  void row(const std::vector<double>& values);
  void close();  // IO_ERROR if a write failed

 private:
  std::string path_;
  std::ofstream out_;
};

}  // namespace blq
