#include "treeload/growth.hpp"

#include <limits>
#include <string>

#include "treeload/errors.hpp"

namespace treeload {

namespace {

constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kM1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

}  // namespace

Philox4x64Block philox4x64(Philox4x64Block c, Philox4x64Key k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kW0;
      k[1] += kW1;
    }
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

std::uint64_t splitmix64(std::uint64_t x) {
  std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Philox4x64::Philox4x64(RngSpec spec)
    : key_{spec.master_seed, splitmix64(spec.stream_id)}, counter_{0, 0, 0, 0} {}

Philox4x64::Philox4x64(Philox4x64Key key, Philox4x64Block counter) : key_(key), counter_(counter) {}

void Philox4x64::refill() {
  buffer_ = philox4x64(counter_, key_);
  for (auto& word : counter_)
    if (++word != 0) break;
  index_ = 0;
}

std::uint64_t Philox4x64::uniform_below(std::uint64_t bound) {
  std::uint64_t x = (*this)();
  unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = (*this)();
      m = static_cast<unsigned __int128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

void Tree::validate() const {
  for (std::size_t i = 1; i < parent.size(); ++i)
    if (parent[i] >= i)
      throw MalformedTreeError("parent of node " + std::to_string(i) + " is not older than the node");
}

std::uint32_t sample_target(double alpha, std::span<const std::uint32_t> parent,
                            std::uint32_t existing, Philox4x64& rng) {
  if (existing == 0) throw DomainError("sample_target: the tree has no nodes");
  if (existing == 1) return 0;
  const double t = static_cast<double>(existing);
  bool uniform = alpha == 0.0;
  if (alpha > 0.0 && alpha < 1.0) {
    // node urn weight (1-alpha) per node, edge urn weight alpha per in-edge
    const double node_mass = (1.0 - alpha) * t;
    uniform = rng.uniform01() * (node_mass + alpha * (t - 1.0)) < node_mass;
  }
  if (uniform) return static_cast<std::uint32_t>(rng.uniform_below(existing));
  const auto edge = 1 + rng.uniform_below(existing - 1);
  return parent[edge];
}

Tree grow(const ModelParams& params, std::uint64_t size, RngSpec spec) {
  params.validate();
  if (size < 1) throw DomainError("grow: size must be at least 1");
  if (size >= std::numeric_limits<std::uint32_t>::max()) throw DomainError("grow: size exceeds 32-bit node ids");
  Tree tree;
  tree.parent.assign(size + 1, 0);
  Philox4x64 rng(spec);
  const double alpha = params.alpha;
  std::uint32_t* parent = tree.parent.data();
  for (std::uint32_t node = 1; node <= size; ++node)
    parent[node] = sample_target(alpha, std::span<const std::uint32_t>(parent, node), node, rng);
  return tree;
}

void write_parents_csv(std::ostream& os, const Tree& tree) {
  os << "node,parent\n";
  std::string line;
  for (std::size_t i = 1; i < tree.parent.size(); ++i) {
    line.clear();
    line += std::to_string(i);
    line += ',';
    line += std::to_string(tree.parent[i]);
    line += '\n';
    os << line;
  }
}

}  // namespace treeload
