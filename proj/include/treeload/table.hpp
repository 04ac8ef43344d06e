#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treeload/model.hpp"
#include "treeload/parallel.hpp"

namespace treeload {

enum class DistKind { joint, marginal_n, marginal_q, cond_n_given_q, cond_q_given_n, load_given_q, load };

std::string to_string(DistKind k);

// One support point. For one-dimensional kinds `b` is -1; for load kinds `a` is L.
struct TableRow {
  std::int64_t a = 0;
  std::int64_t b = -1;
  double p = 0.0;
};

struct DistTable {
  DistKind kind = DistKind::joint;
  ModelParams params;
  NetworkTime time = NetworkTime::infinite();
  std::int64_t condition = -1;  // q or n for conditional kinds
  std::vector<TableRow> rows;
};

struct TableRange {
  std::int64_t n_max = -1;  // -1: full finite support
  std::int64_t q_max = -1;
  std::int64_t condition = 0;
};

// Rows are in lexicographic (n, then q) order; load kinds are ordered by L.
DistTable tabulate(DistKind kind, const ModelParams& params, NetworkTime time, const TableRange& range,
                   Exec exec = Exec::parallel);

}  // namespace treeload
