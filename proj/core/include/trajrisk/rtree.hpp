// Copyright 2026 The trajrisk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace trajrisk {

struct Rect {
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;

  bool contains(double x, double y) const {
    return x >= min_x && x <= max_x && y >= min_y && y <= max_y;
  }

  void expand(const Rect& other) {
    min_x = std::min(min_x, other.min_x);
    min_y = std::min(min_y, other.min_y);
    max_x = std::max(max_x, other.max_x);
    max_y = std::max(max_y, other.max_y);
  }
};

// Static bounding-box tree, bulk-loaded with sort-tile-recursive packing.
// Read-only after construction; point queries visit every entry whose
// rectangle contains the query point.
class StaticRTree {
 public:
  using Entry = std::pair<Rect, std::uint32_t>;

  StaticRTree() = default;

  explicit StaticRTree(std::vector<Entry> entries)
      : entries_(std::move(entries)) {
    build();
  }

  template <typename Visitor>
  void visit_point(double x, double y, Visitor&& visit) const {
    if (nodes_.empty()) return;
    // Iterative DFS from the root (last node). Depth is at most
    // log16(2^32) = 8 levels, each pushing at most kNodeCapacity children.
    std::uint32_t stack[160];
    int top = 0;
    stack[top++] = static_cast<std::uint32_t>(nodes_.size() - 1);
    while (top > 0) {
      const Node& node = nodes_[stack[--top]];
      if (!node.box.contains(x, y)) continue;
      if (node.leaf) {
        for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
          if (entries_[i].first.contains(x, y)) visit(entries_[i].second);
        }
      } else {
        for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
          stack[top++] = i;
        }
      }
    }
  }

  std::size_t size() const { return entries_.size(); }

 private:
  static constexpr std::uint32_t kNodeCapacity = 16;

  struct Node {
    Rect box;
    std::uint32_t first = 0;  // entry index (leaf) or child node index
    std::uint32_t count = 0;
    bool leaf = true;
  };

  static double center_x(const Rect& r) { return (r.min_x + r.max_x) * 0.5; }
  static double center_y(const Rect& r) { return (r.min_y + r.max_y) * 0.5; }

  // Sort-tile-recursive: order rectangles into vertical slabs by center x,
  // by center y inside each slab, then pack runs of kNodeCapacity.
  template <typename GetRect>
  static void str_order(std::vector<std::uint32_t>& order, GetRect&& rect_of) {
    const std::size_t n = order.size();
    const std::size_t groups = (n + kNodeCapacity - 1) / kNodeCapacity;
    const std::size_t slabs =
        static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(groups))));
    const std::size_t slab_size =
        slabs == 0 ? n : ((groups + slabs - 1) / slabs) * kNodeCapacity;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) {
                       return center_x(rect_of(a)) < center_x(rect_of(b));
                     });
    for (std::size_t start = 0; start < n; start += slab_size) {
      auto first = order.begin() + static_cast<std::ptrdiff_t>(start);
      auto last = order.begin() +
                  static_cast<std::ptrdiff_t>(std::min(start + slab_size, n));
      std::stable_sort(first, last, [&](std::uint32_t a, std::uint32_t b) {
        return center_y(rect_of(a)) < center_y(rect_of(b));
      });
    }
  }

  void build() {
    nodes_.clear();
    const std::size_t n = entries_.size();
    if (n == 0) return;

    std::vector<std::uint32_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
    str_order(order, [&](std::uint32_t i) -> const Rect& {
      return entries_[i].first;
    });
    std::vector<Entry> reordered;
    reordered.reserve(n);
    for (std::uint32_t i : order) reordered.push_back(entries_[i]);
    entries_ = std::move(reordered);

    // Leaf level.
    std::uint32_t level_begin = 0;
    for (std::size_t start = 0; start < n; start += kNodeCapacity) {
      Node node;
      node.leaf = true;
      node.first = static_cast<std::uint32_t>(start);
      node.count = static_cast<std::uint32_t>(
          std::min<std::size_t>(kNodeCapacity, n - start));
      node.box = entries_[start].first;
      for (std::uint32_t i = node.first + 1; i < node.first + node.count; ++i) {
        node.box.expand(entries_[i].first);
      }
      nodes_.push_back(node);
    }

    // Upper levels until a single root remains.
    while (nodes_.size() - level_begin > 1) {
      const std::uint32_t level_end = static_cast<std::uint32_t>(nodes_.size());
      const std::uint32_t level_count = level_end - level_begin;
      std::vector<std::uint32_t> node_order(level_count);
      for (std::uint32_t i = 0; i < level_count; ++i) node_order[i] = i;
      str_order(node_order, [&](std::uint32_t i) -> const Rect& {
        return nodes_[level_begin + i].box;
      });
      // Nodes within a level are already contiguous; re-pack them in STR
      // order so each parent covers a contiguous child range.
      std::vector<Node> level(level_count);
      for (std::uint32_t i = 0; i < level_count; ++i) {
        level[i] = nodes_[level_begin + node_order[i]];
      }
      std::copy(level.begin(), level.end(),
                nodes_.begin() + static_cast<std::ptrdiff_t>(level_begin));

      for (std::uint32_t start = 0; start < level_count;
           start += kNodeCapacity) {
        Node parent;
        parent.leaf = false;
        parent.first = level_begin + start;
        parent.count = std::min(kNodeCapacity, level_count - start);
        parent.box = nodes_[parent.first].box;
        for (std::uint32_t i = parent.first + 1;
             i < parent.first + parent.count; ++i) {
          parent.box.expand(nodes_[i].box);
        }
        nodes_.push_back(parent);
      }
      level_begin = level_end;
    }
  }

  std::vector<Entry> entries_;
  std::vector<Node> nodes_;
};

}  // namespace trajrisk
