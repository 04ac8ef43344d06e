#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "treeload/model.hpp"

namespace treeload::cli {

enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kCompareFailed = 2,
  kConfigError = 64,
  kNumericError = 70,
  kIoError = 74,
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string alpha = "0.5";
  std::string out;  // empty: stdout
  int precision_bits = 53;
  int threads = 0;  // 0: OpenMP default

  ModelParams params() const;
};

struct ExactOptions {
  Common common;
  std::string kind;
  std::string tau = "inf";
  std::int64_t max_n = -1;
  std::int64_t max_q = -1;
  std::optional<std::int64_t> q;
  std::optional<std::int64_t> n;
  std::string lambda;  // "lo:hi[:step]"
};

struct GrowOptions {
  Common common;
  std::uint64_t size = 0;
  std::uint64_t reps = 1;
  std::uint64_t seed = 0;
  bool q_min = false;
  std::string parents_out;
  std::string stats_out;
};

struct CompareOptions {
  Common common;
  std::string kind;
  std::uint64_t size = 0;
  std::uint64_t reps = 1;
  std::uint64_t seed = 0;
  std::int64_t q = 1;
  double z_max = 4.0;
  double min_expected = 10.0;
  double ccdf_floor = 1e-4;
  std::int64_t max_condition = -1;  // -1: every populated condition
};

struct VerifyOptions {
  Common common;
  std::int64_t tau_max = 100;
  std::int64_t enumerate_max = 6;
  double tol = 1e-9;
  std::uint64_t seed = 1;
};

int cmd_exact(const ExactOptions& o);
int cmd_grow(const GrowOptions& o);
int cmd_compare(const CompareOptions& o);
int cmd_verify(const VerifyOptions& o);

}  // namespace treeload::cli
