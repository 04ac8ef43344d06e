#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "treeload/growth.hpp"

namespace treeload {

using u128 = unsigned __int128;

struct EdgeRecord {
  std::uint32_t node = 0;
  std::uint32_t tau_e = 0;
  std::uint32_t q = 0;
  std::uint32_t n = 0;
  std::uint64_t L = 0;
  std::int64_t q_min = -1;  // -1 when not requested
};

// Subtree sizes by one backward pass over node ids.
std::vector<EdgeRecord> edge_records(const Tree& tree, bool with_q_min = false);

void write_records_header(std::ostream& os, bool with_q_min);
void write_records(std::ostream& os, std::uint64_t rep, std::span<const EdgeRecord> records, bool with_q_min);

// Integer counters over realizations sharing alpha and tau. Merging is exact,
// so any reduction order gives identical results.
struct EnsembleStats {
  static constexpr std::uint32_t kDenseRows = 512;

  // Per-realization tail counts of the load restricted to in-degree q
  // (q = -1: all edges), indexed by the cluster threshold x = 0..(tau-1)/2.
  struct LoadTrack {
    std::int64_t q = -1;
    std::uint64_t sum_m = 0;  // edges with this q
    u128 sum_m2 = 0;
    std::vector<std::uint64_t> sum_c;
    std::vector<u128> sum_c2;
    std::vector<u128> sum_cm;
    bool operator==(const LoadTrack&) const = default;
  };

  double alpha = 0.0;
  std::int64_t tau = 0;
  std::uint64_t realizations = 0;

  std::vector<std::uint64_t> joint_dense;  // rows n < kDenseRows, triangular
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> joint_sparse;
  std::vector<std::uint64_t> count_n;
  std::vector<std::uint64_t> count_q;

  std::vector<std::uint64_t> sum_n_by_q;
  std::vector<u128> sum_n2_by_q;
  std::vector<std::uint64_t> sum_L_by_q;
  std::vector<u128> sum_L2_by_q;
  std::vector<std::uint64_t> sum_q_by_n;
  std::vector<u128> sum_q2_by_n;

  // Per-realization tail counts c_r(x) = #{edges with value >= x}.
  std::vector<std::uint64_t> tail_n_sum;
  std::vector<u128> tail_n_sum2;
  std::vector<std::uint64_t> tail_q_sum;
  std::vector<u128> tail_q_sum2;
  std::vector<LoadTrack> load_tracks;

  EnsembleStats() = default;
  EnsembleStats(double alpha, std::int64_t tau, const std::vector<std::int64_t>& load_track_q = {1, 2});

  // records of one realization of size tau
  void add(std::span<const EdgeRecord> records);
  // MixedParameterError unless alpha, tau and tracked q agree.
  void merge(const EnsembleStats& other);

  std::uint64_t joint(std::uint32_t n, std::uint32_t q) const;
  // (n, q, count) for every non-empty cell in lexicographic order
  std::vector<std::tuple<std::uint32_t, std::uint32_t, std::uint64_t>> joint_cells() const;
  std::uint64_t total_edges() const;
  const LoadTrack* track(std::int64_t q) const;

  nlohmann::json to_json() const;
  static EnsembleStats from_json(const nlohmann::json& j);

  bool operator==(const EnsembleStats&) const = default;
};

enum class CcdfKind { n, q, load_given_q, load };

struct CcdfPoint {
  std::uint64_t support = 0;  // n, q, integer Lambda (load_given_q) or L (load)
  double ccdf = 0.0;
  double std_error = 0.0;
  std::uint64_t tail_count = 0;
  std::uint64_t sample_count = 0;
};

// Right-tail relative frequencies at integer support points. For load_given_q
// the support is Lambda = 1, 2, ... and the tail event is L >= Lambda (tau + 1 - Lambda),
// the load of a cluster of Lambda nodes; Lambda tends to L / (tau + 1) as tau grows.
// EmptyConditionError if no edge had the requested q.
std::vector<CcdfPoint> empirical_ccdf(const EnsembleStats& stats, CcdfKind kind, std::int64_t q = -1);

struct MeanPoint {
  std::int64_t condition = 0;
  std::uint64_t count = 0;
  double mean = 0.0;
  double std_error = 0.0;
};

struct ConditionalMeans {
  std::vector<MeanPoint> n_given_q;
  std::vector<MeanPoint> q_given_n;
  std::vector<MeanPoint> lambda_given_q;  // Lambda = L / (tau + 1)
};

ConditionalMeans conditional_means(const EnsembleStats& stats);

}  // namespace treeload
