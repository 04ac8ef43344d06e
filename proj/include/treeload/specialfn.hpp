#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <span>
#include <vector>

#include <gmpxx.h>

namespace treeload {

inline constexpr double kEulerGamma = 0.577215664901532860606512090082;

// Sign and natural log of |value|. `cond` is a first-order estimate of the
// relative error of the value in units of the working epsilon.
template <class R>
struct BasicSignedLog {
  int sign = 0;
  R log_magnitude{};
  double cond = 1.0;
};

using SignedLogReal = BasicSignedLog<double>;

SignedLogReal to_signed_log(double x);
double to_real(const SignedLogReal& v);
SignedLogReal operator*(const SignedLogReal& a, const SignedLogReal& b);
SignedLogReal operator/(const SignedLogReal& a, const SignedLogReal& b);

struct PrecisionPolicy {
  int base_precision = 53;
  int escalation_precision = 256;
  double cancellation_threshold = 1e-6;
  int max_precision = 1 << 15;

  // Throws DomainError on an inconsistent policy.
  void validate() const;
};

SignedLogReal pochhammer_int(double x, std::int64_t n);

// Gamma(x+s)/Gamma(x) for x > 0, 0 <= s <= 1.
double pochhammer_frac(double x, double s);

// log Gamma(x+s) - log Gamma(x) for x > 0 and x+s > 0, accurate when both are large.
double log_gamma_ratio(double x, double s);

double digamma(double x);

class StirlingTable {
 public:
  explicit StirlingTable(int n_max = 256);
  StirlingTable(const StirlingTable&) = delete;
  StirlingTable& operator=(const StirlingTable&) = delete;

  int n_max() const { return n_max_; }
  // Signed s(n,k); falling factorial x(x-1)...(x-n+1) = sum_k s(n,k) x^k.
  const mpz_class& at(int n, int k);

 private:
  void extend_to(int n);

  int n_max_;
  std::mutex mutex_;
  std::vector<std::vector<mpz_class>> rows_;
  std::atomic<int> built_{0};
};

StirlingTable& stirling_table();

mpz_class stirling_first(int n, int k);

// Coefficient of x^k in the rising factorial (x)_n, i.e. |s(n,k)|.
mpz_class rising_coefficient(int n, int k);

struct CompensatedSum {
  double value = 0.0;
  double cancellation_ratio = 1.0;
};

CompensatedSum compensated_sum(std::span<const SignedLogReal> terms,
                               const PrecisionPolicy& policy = {});

struct Evaluation {
  SignedLogReal value;
  // |result| / (error-weighted term magnitude); 1 means no cancellation.
  double cancellation_ratio = 1.0;
  int precision_bits = 53;
};

double sum_term(std::int64_t n, std::int64_t q, double alpha,
                const PrecisionPolicy& policy = {});

// forced_bits > 0 skips the double pass and evaluates at that precision.
Evaluation sum_term_eval(std::int64_t n, std::int64_t q, double alpha,
                         const PrecisionPolicy& policy = {}, int forced_bits = 0);

}  // namespace treeload
