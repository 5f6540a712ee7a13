#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

namespace orgmap {

class UnionFind {
 public:
  explicit UnionFind(size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), size_t{0});
  }

  size_t find(size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(size_t a, size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

  bool same(size_t a, size_t b) { return find(a) == find(b); }

 private:
  std::vector<size_t> parent_;
  std::vector<size_t> rank_;
};

}  // namespace orgmap
