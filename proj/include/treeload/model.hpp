#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "treeload/specialfn.hpp"

namespace treeload {

struct AlphaRatio {
  long num = 0;
  long den = 1;
};

struct ModelParams {
  double alpha = 0.5;
  PrecisionPolicy policy{};
  // Set when alpha was given as an exact ratio; enables rational enumeration.
  std::optional<AlphaRatio> ratio;

  static ModelParams from_ratio(long num, long den);
  // Accepts "0.25" or "1/4".
  static ModelParams parse(const std::string& text);

  void validate() const;
  bool is_er() const { return alpha == 0.0; }
  bool is_star() const { return alpha == 1.0; }
  // a = 1/alpha - 1; DomainError at alpha = 0.
  double attractiveness() const;
};

struct EdgeState {
  std::int64_t n = 0;
  std::int64_t q = 0;
  friend bool operator==(const EdgeState&, const EdgeState&) = default;
};

class NetworkTime {
 public:
  static NetworkTime finite(std::int64_t tau);
  static NetworkTime infinite() { return NetworkTime(); }

  bool is_infinite() const { return !tau_.has_value(); }
  std::int64_t value() const;  // DomainError when infinite

 private:
  NetworkTime() = default;
  std::optional<std::int64_t> tau_;
};

}  // namespace treeload
