#include "treeload/format.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace treeload {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, end);
}

std::string format_u128(unsigned __int128 x) {
  if (x == 0) return "0";
  std::string out;
  while (x > 0) {
    out.insert(out.begin(), static_cast<char>('0' + static_cast<int>(x % 10)));
    x /= 10;
  }
  return out;
}

unsigned __int128 parse_u128(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("parse_u128: empty string");
  unsigned __int128 x = 0;
  for (char c : text) {
    if (c < '0' || c > '9') throw std::invalid_argument("parse_u128: not a decimal integer: " + text);
    const unsigned __int128 next = x * 10 + static_cast<unsigned>(c - '0');
    if (next / 10 != x) throw std::out_of_range("parse_u128: overflow");
    x = next;
  }
  return x;
}

CsvWriter& CsvWriter::field(const std::string& s) {
  if (!empty_) line_ += ',';
  empty_ = false;
  if (s.find_first_of(",\"\n") == std::string::npos) {
    line_ += s;
  } else {
    line_ += '"';
    for (char c : s) {
      if (c == '"') line_ += '"';
      line_ += c;
    }
    line_ += '"';
  }
  return *this;
}

void CsvWriter::end_row() {
  line_ += '\n';
  os_ << line_;
  line_.clear();
  empty_ = true;
}

}  // namespace treeload
