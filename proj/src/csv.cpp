#include "blq/csv.hpp"

#include <charconv>

#include "blq/error.hpp"

namespace blq {

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) fail("io", ErrorCode::Io, "cannot open " + path + " for writing");
}

void CsvWriter::header(const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) out_ << (i ? "," : "") << names[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
  out_ << '\n';
}

void CsvWriter::close() {
  out_.flush();
  if (!out_) fail("io", ErrorCode::Io, "write to " + path_ + " failed");
  out_.close();
}

}  // namespace blq
