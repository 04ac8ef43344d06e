#pragma once

#include <cstdint>
#include <ostream>
#include <string>

namespace treeload {

// Shortest decimal string that round-trips to the same double.
std::string format_double(double x);
std::string format_u128(unsigned __int128 x);
unsigned __int128 parse_u128(const std::string& text);

// Appends a CSV line built from already-formatted fields.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  CsvWriter& field(const std::string& s);
  CsvWriter& field(double x) { return field(format_double(x)); }
  CsvWriter& field(std::int64_t x) { return field(std::to_string(x)); }
  CsvWriter& field(std::uint64_t x) { return field(std::to_string(x)); }
  void end_row();

 private:
  std::ostream& os_;
  std::string line_;
  bool empty_ = true;
};

}  // namespace treeload
