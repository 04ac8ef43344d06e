#include "treeload/model.hpp"

#include <charconv>
#include <cmath>
#include <numeric>

#include "treeload/errors.hpp"

namespace treeload {

ModelParams ModelParams::from_ratio(long num, long den) {
  if (den <= 0 || num < 0 || num > den) throw DomainError("alpha ratio must satisfy 0 <= num <= den, den > 0");
  const long g = std::gcd(num, den);
  ModelParams p;
  p.ratio = AlphaRatio{num / g, den / g};
  p.alpha = static_cast<double>(num) / static_cast<double>(den);
  return p;
}

namespace {

bool parse_long(std::string_view s, long& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

ModelParams ModelParams::parse(const std::string& text) {
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    long num = 0;
    long den = 0;
    if (!parse_long(std::string_view(text).substr(0, slash), num) ||
        !parse_long(std::string_view(text).substr(slash + 1), den))
      throw DomainError("malformed alpha ratio: " + text);
    return from_ratio(num, den);
  }
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw DomainError("malformed alpha: " + text);
  // short plain decimals such as "0.25" are exact ratios
  if (const auto dot = text.find('.'); text.size() <= 12 && text.find_first_not_of("0123456789.") == std::string::npos) {
    const std::string whole = text.substr(0, dot);
    const std::string frac = dot == std::string::npos ? std::string() : text.substr(dot + 1);
    long num = 0;
    if (parse_long(whole + frac, num)) {
      long den = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
      if (num <= den) return from_ratio(num, den);
    }
  }
  ModelParams p;
  p.alpha = v;
  p.validate();
  return p;
}

void ModelParams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0,1]");
  policy.validate();
}

double ModelParams::attractiveness() const {
  if (alpha == 0.0) throw DomainError("initial attractiveness is infinite at alpha = 0");
  return 1.0 / alpha - 1.0;
}

NetworkTime NetworkTime::finite(std::int64_t tau) {
  if (tau < 1) throw DomainError("network time must be at least 1");
  NetworkTime t;
  t.tau_ = tau;
  return t;
}

std::int64_t NetworkTime::value() const {
  if (!tau_) throw DomainError("network time is infinite");
  return *tau_;
}

}  // namespace treeload
