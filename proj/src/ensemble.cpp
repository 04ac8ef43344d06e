#include "treeload/ensemble.hpp"

#include <exception>

#include <omp.h>

#include "treeload/errors.hpp"
#include "treeload/growth.hpp"

namespace treeload {

std::vector<EdgeRecord> realization(const EnsembleConfig& cfg, std::uint64_t rep, bool with_q_min) {
  const Tree tree = grow(cfg.params, cfg.size, RngSpec{cfg.seed, rep});
  return edge_records(tree, with_q_min);
}

EnsembleStats run_ensemble(const EnsembleConfig& cfg, Exec exec) {
  cfg.params.validate();
  if (cfg.reps < 1) throw DomainError("run_ensemble: reps must be at least 1");
  const auto tau = static_cast<std::int64_t>(cfg.size);
  EnsembleStats total(cfg.params.alpha, tau, cfg.load_track_q);
  if (exec == Exec::serial) {
    for (std::uint64_t r = 0; r < cfg.reps; ++r) total.add(realization(cfg, r));
    return total;
  }
  std::exception_ptr error;
  const auto reps = static_cast<long long>(cfg.reps);
#pragma omp parallel
  {
    EnsembleStats local(cfg.params.alpha, tau, cfg.load_track_q);
#pragma omp for schedule(dynamic, 1)
    for (long long r = 0; r < reps; ++r) {
      try {
        local.add(realization(cfg, static_cast<std::uint64_t>(r)));
      } catch (...) {
#pragma omp critical(treeload_ensemble_error)
        if (!error) error = std::current_exception();
      }
    }
    if (local.realizations > 0) {
#pragma omp critical(treeload_ensemble_merge)
      total.merge(local);
    }
  }
  if (error) std::rethrow_exception(error);
  return total;
}

}  // namespace treeload
