#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbmlab/random.hpp"

namespace rbmlab {

/// State of n binary units, encoded little-endian: coordinate i is bit i of
/// the index. All modules share this convention.
using state_t = std::uint32_t;

/// Dense vectors hold 2^n doubles, so n is capped.
inline constexpr int max_dense_dim = 20;

/// Cubical-partition enumeration is doubly exponential; hard guard.
inline constexpr int max_enumeration_dim = 6;

inline void check_dim(int n, int limit = max_dense_dim) {
  if (n < 1 || n > limit)
    throw std::invalid_argument("dimension n must be in [1, " +
                                std::to_string(limit) + "], got " +
                                std::to_string(n));
}

inline state_t cube_mask(int n) { return (state_t{1} << n) - 1; }
inline std::size_t cube_size(int n) { return std::size_t{1} << n; }

/// Axis-aligned face of the n-cube: the states that agree with fixed_values
/// on the coordinates of fixed_mask. Free coordinates are the unset bits.
struct Face {
  int n = 0;
  state_t fixed_mask = 0;
  state_t fixed_values = 0;

  Face() = default;
  Face(int dim_n, state_t mask, state_t values)
      : n(dim_n), fixed_mask(mask), fixed_values(values) {
    check_dim(n);
    if ((mask | values) > cube_mask(n))
      throw std::invalid_argument("face mask/values exceed cube");
    if ((values & ~mask) != 0)
      throw std::invalid_argument("face fixed_values set outside fixed_mask");
  }

  static Face full_cube(int n) { return Face(n, 0, 0); }
  static Face singleton(int n, state_t v) { return Face(n, cube_mask(n), v); }
  /// The edge through v with coordinate `coord` free.
  static Face edge(int n, state_t v, int coord) {
    const state_t free_bit = state_t{1} << coord;
    return Face(n, cube_mask(n) & ~free_bit, v & ~free_bit);
  }

  bool contains(state_t v) const { return (v & fixed_mask) == fixed_values; }
  int dim() const { return n - std::popcount(fixed_mask); }
  std::size_t size() const { return std::size_t{1} << dim(); }
  state_t free_mask() const { return cube_mask(n) & ~fixed_mask; }
  /// Member with all free coordinates zero.
  state_t anchor() const { return fixed_values; }

  std::vector<int> free_coords() const {
    std::vector<int> coords;
    for (int i = 0; i < n; ++i)
      if (!(fixed_mask >> i & 1)) coords.push_back(i);
    return coords;
  }

  /// Members in ascending index order.
  std::vector<state_t> members() const {
    std::vector<state_t> out;
    out.reserve(size());
    const auto coords = free_coords();
    for (state_t c = 0; c < (state_t{1} << coords.size()); ++c) {
      state_t v = fixed_values;
      for (std::size_t b = 0; b < coords.size(); ++b)
        if (c >> b & 1) v |= state_t{1} << coords[b];
      out.push_back(v);
    }
    return out;
  }

  /// Two faces intersect iff their fixed values agree on the commonly fixed
  /// coordinates.
  bool disjoint_with(const Face& other) const {
    return ((fixed_values ^ other.fixed_values) & fixed_mask &
            other.fixed_mask) != 0;
  }

  bool operator==(const Face&) const = default;
};

inline std::vector<state_t> face_members(const Face& f) { return f.members(); }

/// If the states form a face, return it. The test is exact: the span of the
/// varying coordinates must have the same cardinality as the block.
inline bool block_as_face(int n, const std::vector<state_t>& block, Face* out) {
  if (block.empty() || !std::has_single_bit(block.size())) return false;
  state_t varying = 0;
  for (state_t v : block) varying |= v ^ block.front();
  if (cube_size(std::popcount(varying)) != block.size()) return false;
  if (out)
    *out = Face(n, cube_mask(n) & ~varying, block.front() & ~varying);
  return true;
}

/// Partition of {0,1}^n into disjoint blocks, kept in canonical order
/// (blocks sorted by smallest member, members ascending). covers_all is
/// false for partial partitions: disjoint blocks covering only a subset.
struct Partition {
  int n = 0;
  std::vector<std::vector<state_t>> blocks;
  bool covers_all = true;
  bool is_cubical = false;
  std::vector<Face> faces;  // parallel to blocks when is_cubical

  static Partition from_blocks(int n, std::vector<std::vector<state_t>> blocks,
                               bool require_cover = true);
  static Partition from_faces(int n, const std::vector<Face>& faces,
                              bool require_cover = true);

  std::size_t block_count() const { return blocks.size(); }

  /// Index of the block containing v, or -1 if uncovered.
  int block_of(state_t v) const {
    for (std::size_t i = 0; i < blocks.size(); ++i)
      if (std::binary_search(blocks[i].begin(), blocks[i].end(), v))
        return static_cast<int>(i);
    return -1;
  }

  /// Per-state block index table (-1 for uncovered states).
  std::vector<int> block_index_table() const {
    std::vector<int> table(cube_size(n), -1);
    for (std::size_t i = 0; i < blocks.size(); ++i)
      for (state_t v : blocks[i]) table[v] = static_cast<int>(i);
    return table;
  }
};

inline Partition Partition::from_blocks(int n,
                                        std::vector<std::vector<state_t>> in,
                                        bool require_cover) {
  check_dim(n);
  Partition p;
  p.n = n;
  p.blocks = std::move(in);
  std::size_t covered = 0;
  std::vector<char> seen(cube_size(n), 0);
  for (auto& block : p.blocks) {
    if (block.empty()) throw std::invalid_argument("empty partition block");
    std::sort(block.begin(), block.end());
    for (state_t v : block) {
      if (v >= cube_size(n)) throw std::invalid_argument("state out of range");
      if (seen[v]) throw std::invalid_argument("partition blocks overlap");
      seen[v] = 1;
      ++covered;
    }
  }
  std::sort(p.blocks.begin(), p.blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  p.covers_all = covered == cube_size(n);
  if (require_cover && !p.covers_all)
    throw std::invalid_argument("blocks do not cover the cube");
  p.is_cubical = true;
  p.faces.clear();
  for (const auto& block : p.blocks) {
    Face f;
    if (!block_as_face(n, block, &f)) {
      p.is_cubical = false;
      p.faces.clear();
      break;
    }
    p.faces.push_back(f);
  }
  return p;
}

inline Partition Partition::from_faces(int n, const std::vector<Face>& faces,
                                       bool require_cover) {
  std::vector<std::vector<state_t>> blocks;
  blocks.reserve(faces.size());
  for (const auto& f : faces) {
    if (f.n != n) throw std::invalid_argument("face dimension mismatch");
    blocks.push_back(f.members());
  }
  return from_blocks(n, std::move(blocks), require_cover);
}

/// Partition into m+1 faces with l = 2(m+1) - 2^(n-k+1) blocks of size
/// 2^(k-1) and the rest of size 2^k, where k = n - floor(log2(m+1)). Blocks
/// are carved as aligned index ranges, largest first, so the fixed
/// coordinates are the highest-index ones.
inline Partition balanced_cubical_partition(int n, int block_count) {
  check_dim(n);
  const int max_blocks = static_cast<int>(cube_size(n - 1));
  if (block_count < 1 || block_count > max_blocks)
    throw std::invalid_argument("block count must be in [1, 2^(n-1)]");
  const int k = n - (std::bit_width(static_cast<unsigned>(block_count)) - 1);
  const int l = 2 * block_count - static_cast<int>(cube_size(n - k + 1));
  std::vector<Face> faces;
  faces.reserve(block_count);
  std::size_t offset = 0;
  auto carve = [&](int count, int dim) {
    const std::size_t size = cube_size(dim);
    for (int i = 0; i < count; ++i) {
      const state_t free_bits = cube_mask(dim);
      faces.emplace_back(n, cube_mask(n) & ~free_bits,
                         static_cast<state_t>(offset));
      offset += size;
    }
  };
  carve(block_count - l, k);
  carve(l, k - 1);
  return Partition::from_faces(n, faces);
}

/// Blocks are the Hamming-weight classes; cubical only for n = 1.
inline Partition exchangeable_partition(int n) {
  check_dim(n);
  std::vector<std::vector<state_t>> blocks(n + 1);
  for (state_t v = 0; v < cube_size(n); ++v)
    blocks[std::popcount(v)].push_back(v);
  return Partition::from_blocks(n, std::move(blocks));
}

namespace detail {

/// Bitset over the <= 64 states of an n <= 6 cube.
inline std::uint64_t face_state_bits(state_t anchor, state_t free_bits) {
  std::uint64_t bits = 0;
  state_t sub = free_bits;
  for (;;) {
    bits |= std::uint64_t{1} << ((anchor & ~free_bits) | sub);
    if (sub == 0) break;
    sub = (sub - 1) & free_bits;
  }
  return bits;
}

template <typename Visitor>
bool enumerate_partitions_rec(int n, int blocks_left, std::uint64_t uncovered,
                              std::vector<Face>& chosen, Visitor& visit) {
  if (uncovered == 0) {
    return visit(Partition::from_faces(n, chosen));
  }
  if (blocks_left == 0) return true;
  const state_t seed = static_cast<state_t>(std::countr_zero(uncovered));
  for (state_t free_bits = 0; free_bits <= cube_mask(n); ++free_bits) {
    const std::uint64_t members = face_state_bits(seed, free_bits);
    if ((members & ~uncovered) != 0) continue;
    chosen.emplace_back(n, cube_mask(n) & ~free_bits, seed & ~free_bits);
    const bool keep_going = enumerate_partitions_rec(
        n, blocks_left - 1, uncovered & ~members, chosen, visit);
    chosen.pop_back();
    if (!keep_going) return false;
  }
  return true;
}

}  // namespace detail

/// Visits every partition of the n-cube into at most max_blocks axis-aligned
/// faces exactly once. Blocks come out sorted by smallest member; the visit
/// order is deterministic. The visitor returns false to stop early.
template <typename Visitor>
void enumerate_cubical_partitions(int n, int max_blocks, Visitor&& visit) {
  check_dim(n, max_enumeration_dim);
  if (max_blocks < 1) throw std::invalid_argument("max_blocks must be >= 1");
  std::vector<Face> chosen;
  const std::uint64_t all =
      (n == 6) ? ~std::uint64_t{0} : (std::uint64_t{1} << cube_size(n)) - 1;
  auto ref = [&visit](const Partition& p) -> bool { return visit(p); };
  detail::enumerate_partitions_rec(n, max_blocks, all, chosen, ref);
}

inline std::vector<Partition> list_cubical_partitions(int n, int max_blocks) {
  std::vector<Partition> out;
  enumerate_cubical_partitions(n, max_blocks, [&](const Partition& p) {
    out.push_back(p);
    return true;
  });
  return out;
}

/// Greedily covers `uncovered` states with maximal faces, lowest state first.
/// Used to complete partial partitions into full ones.
inline std::vector<Face> carve_into_faces(int n,
                                          const std::vector<char>& uncovered_in) {
  check_dim(n);
  std::vector<char> uncovered = uncovered_in;
  std::vector<Face> out;
  for (state_t s = 0; s < cube_size(n); ++s) {
    if (!uncovered[s]) continue;
    state_t free_bits = 0;
    for (int c = 0; c < n; ++c) {
      const state_t trial = free_bits | (state_t{1} << c);
      bool fits = true;
      state_t sub = trial;
      for (;;) {
        if (!uncovered[(s & ~trial) | sub]) {
          fits = false;
          break;
        }
        if (sub == 0) break;
        sub = (sub - 1) & trial;
      }
      if (fits) free_bits = trial;
    }
    Face f(n, cube_mask(n) & ~free_bits, s & ~free_bits);
    for (state_t v : f.members()) uncovered[v] = 0;
    out.push_back(f);
  }
  return out;
}

/// Random partial partition into exactly `block_count` disjoint faces.
/// Face dimensions are drawn per block; draws that run out of space before
/// reaching the requested count are retried.
inline Partition random_cubical_partial_partition(int n, int block_count,
                                                  Rng& rng) {
  check_dim(n);
  if (block_count < 1 || block_count > static_cast<int>(cube_size(n)))
    throw std::invalid_argument("block count out of range");
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<char> uncovered(cube_size(n), 1);
    std::size_t left = cube_size(n);
    std::vector<Face> faces;
    bool ok = true;
    for (int b = 0; b < block_count; ++b) {
      if (left == 0) {
        ok = false;
        break;
      }
      std::size_t pick = rng.below(left);
      state_t s = 0;
      for (state_t v = 0; v < cube_size(n); ++v) {
        if (!uncovered[v]) continue;
        if (pick == 0) {
          s = v;
          break;
        }
        --pick;
      }
      const int dim_cap = static_cast<int>(rng.below(n + 1));
      std::vector<int> order(n);
      for (int i = 0; i < n; ++i) order[i] = i;
      for (int i = n - 1; i > 0; --i)
        std::swap(order[i], order[rng.below(i + 1)]);
      state_t free_bits = 0;
      int dim = 0;
      for (int c : order) {
        if (dim >= dim_cap) break;
        const state_t trial = free_bits | (state_t{1} << c);
        bool fits = true;
        state_t sub = trial;
        for (;;) {
          if (!uncovered[(s & ~trial) | sub]) {
            fits = false;
            break;
          }
          if (sub == 0) break;
          sub = (sub - 1) & trial;
        }
        if (fits) {
          free_bits = trial;
          ++dim;
        }
      }
      Face f(n, cube_mask(n) & ~free_bits, s & ~free_bits);
      for (state_t v : f.members()) {
        uncovered[v] = 0;
        --left;
      }
      faces.push_back(f);
    }
    if (ok) return Partition::from_faces(n, faces, /*require_cover=*/false);
  }
  throw std::runtime_error("failed to draw a partial partition");
}

}  // namespace rbmlab
