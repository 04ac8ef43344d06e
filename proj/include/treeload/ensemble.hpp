#pragma once

#include <cstdint>
#include <vector>

#include "treeload/measure.hpp"
#include "treeload/model.hpp"
#include "treeload/parallel.hpp"

namespace treeload {

struct EnsembleConfig {
  ModelParams params;
  std::uint64_t size = 0;  // edges per realization
  std::uint64_t reps = 1;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> load_track_q{1, 2};
};

// Realization r uses stream (seed, r).
std::vector<EdgeRecord> realization(const EnsembleConfig& cfg, std::uint64_t rep, bool with_q_min = false);

// Grows and accumulates every realization. The serial and parallel paths give
// identical counters.
EnsembleStats run_ensemble(const EnsembleConfig& cfg, Exec exec = Exec::parallel);

}  // namespace treeload
