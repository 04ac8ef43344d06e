#include <algorithm>

#include "treeload/errors.hpp"
#include "treeload/exact.hpp"
#include "treeload/table.hpp"

namespace treeload {

std::string to_string(DistKind k) {
  switch (k) {
    case DistKind::joint: return "joint";
    case DistKind::marginal_n: return "marginal_n";
    case DistKind::marginal_q: return "marginal_q";
    case DistKind::cond_n_given_q: return "cond_n_given_q";
    case DistKind::cond_q_given_n: return "cond_q_given_n";
    case DistKind::load_given_q: return "load_given_q";
    case DistKind::load: return "load";
  }
  return "unknown";
}

namespace {

std::int64_t bound(NetworkTime t, std::int64_t requested, const char* name) {
  if (t.is_infinite()) {
    if (requested < 0) throw DomainError(std::string("an infinite network needs an explicit ") + name);
    return requested;
  }
  const std::int64_t full = t.value() - 1;
  return requested < 0 ? full : std::min(requested, full);
}

}  // namespace

DistTable tabulate(DistKind kind, const ModelParams& params, NetworkTime time, const TableRange& range,
                   Exec exec) {
  params.validate();
  DistTable table;
  table.kind = kind;
  table.params = params;
  table.time = time;
  std::vector<TableRow> rows;
  switch (kind) {
    case DistKind::joint: {
      const std::int64_t nm = bound(time, range.n_max, "n_max");
      const std::int64_t qm = range.q_max < 0 ? nm : range.q_max;
      for (std::int64_t n = 0; n <= nm; ++n)
        for (std::int64_t q = 0; q <= std::min(n, qm); ++q) rows.push_back({n, q, 0.0});
      break;
    }
    case DistKind::marginal_n:
      for (std::int64_t n = 0; n <= bound(time, range.n_max, "n_max"); ++n) rows.push_back({n, -1, 0.0});
      break;
    case DistKind::marginal_q:
      for (std::int64_t q = 0; q <= bound(time, range.q_max, "q_max"); ++q) rows.push_back({q, -1, 0.0});
      break;
    case DistKind::cond_n_given_q:
      table.condition = range.condition;
      for (std::int64_t n = range.condition; n <= bound(time, range.n_max, "n_max"); ++n)
        rows.push_back({n, -1, 0.0});
      break;
    case DistKind::cond_q_given_n:
      table.condition = range.condition;
      for (std::int64_t q = 0; q <= range.condition; ++q) rows.push_back({q, -1, 0.0});
      break;
    case DistKind::load_given_q:
    case DistKind::load: {
      if (time.is_infinite()) throw DomainError("load tables need a finite network");
      table.condition = kind == DistKind::load_given_q ? range.condition : -1;
      const std::int64_t tau = time.value();
      for (std::int64_t n = 0; n <= (tau - 1) / 2; ++n)
        rows.push_back({static_cast<std::int64_t>(betweenness_of(n, tau)), -1, 0.0});
      break;
    }
  }
  const std::int64_t cond = range.condition;
  const auto values = map_indices<double>(
      rows.size(),
      [&](std::size_t i) -> double {
        const TableRow& r = rows[i];
        switch (kind) {
          case DistKind::joint: return p_joint(params, time, r.a, r.b);
          case DistKind::marginal_n: return p_marginal_n(params, time, r.a);
          case DistKind::marginal_q: return p_marginal_q(params, time, r.a);
          case DistKind::cond_n_given_q: return cond_n_given_q(params, time, r.a, cond);
          case DistKind::cond_q_given_n: return cond_q_given_n(params, time, r.a, cond);
          case DistKind::load_given_q:
            return p_load_given_q(params, time.value(), static_cast<std::uint64_t>(r.a), cond);
          case DistKind::load: return p_load(params, time.value(), static_cast<std::uint64_t>(r.a));
        }
        return 0.0;
      },
      exec);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].p = values[i];
  table.rows = std::move(rows);
  return table;
}

}  // namespace treeload
