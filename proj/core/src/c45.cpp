// SPDX-License-Identifier: Apache-2.0

#include "itcm/c45.hpp"

#include "itcm/number_text.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

namespace itcm {

auto entropy_bits(std::span<const std::size_t> counts) -> double {
  auto total = std::size_t{0};
  for (auto c : counts)
    total += c;
  if (total == 0)
    return 0.0;
  auto h = 0.0;
  for (auto c : counts) {
    if (c == 0)
      continue;
    auto p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

auto midpoint_threshold(double lo, double hi) -> double {
  auto mid = lo + (hi - lo) / 2.0;
  return mid < hi ? mid : lo;
}

auto best_split(const Dataset& ds, std::span<const std::size_t> rows)
  -> std::optional<SplitCandidate> {
  auto k = ds.class_count();
  auto parent = std::vector<std::size_t>(k, 0);
  for (auto r : rows)
    ++parent[ds.label(r)];
  auto n = static_cast<double>(rows.size());
  auto parent_entropy = entropy_bits(parent);

  auto best = std::optional<SplitCandidate>{};
  auto sorted = std::vector<std::pair<double, std::size_t>>(rows.size());
  auto left = std::vector<std::size_t>(k);
  auto right = std::vector<std::size_t>(k);
  for (std::size_t j = 0; j < ds.n_features(); ++j) {
    for (std::size_t i = 0; i < rows.size(); ++i)
      sorted[i] = {ds.value(rows[i], j), ds.label(rows[i])};
    std::sort(sorted.begin(), sorted.end());
    std::fill(left.begin(), left.end(), 0);
    right = parent;
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
      ++left[sorted[i].second];
      --right[sorted[i].second];
      if (sorted[i].first == sorted[i + 1].first)
        continue;
      auto n_left = static_cast<double>(i + 1);
      auto n_right = n - n_left;
      auto gain = parent_entropy
                  - (n_left / n) * entropy_bits(left)
                  - (n_right / n) * entropy_bits(right);
      if (!(gain > score_tolerance))
        continue;
      auto sizes = std::array<std::size_t, 2>{i + 1, rows.size() - i - 1};
      auto ratio = gain / entropy_bits(sizes);
      if (!best || ratio > best->gain_ratio + score_tolerance)
        best = SplitCandidate{
          j, midpoint_threshold(sorted[i].first, sorted[i + 1].first), gain,
          ratio};
    }
  }
  return best;
}

auto C45Tree::train(const Dataset& ds, std::size_t min_leaf) -> C45Tree {
  if (ds.empty())
    throw std::invalid_argument{"c45: empty training set"};
  if (min_leaf == 0)
    throw std::invalid_argument{"c45: min_leaf must be at least 1"};
  auto tree = C45Tree{ds.classes(), ds.n_features()};
  struct Pending {
    std::size_t node;
    std::vector<std::size_t> rows;
  };
  auto all = std::vector<std::size_t>(ds.size());
  for (std::size_t i = 0; i < all.size(); ++i)
    all[i] = i;
  tree.nodes_.emplace_back();
  auto work = std::vector<Pending>{};
  work.push_back({0, std::move(all)});
  while (!work.empty()) {
    auto [index, rows] = std::move(work.back());
    work.pop_back();
    auto distribution = std::vector<std::size_t>(ds.class_count(), 0);
    for (auto r : rows)
      ++distribution[ds.label(r)];
    auto majority = static_cast<std::size_t>(
      std::max_element(distribution.begin(), distribution.end())
      - distribution.begin());
    auto pure = distribution[majority] == rows.size();
    auto split = std::optional<SplitCandidate>{};
    if (!pure && rows.size() >= 2 * min_leaf)
      split = best_split(ds, rows);
    auto& node = tree.nodes_[index];
    node.label = majority;
    node.distribution = std::move(distribution);
    if (!split)
      continue;
    node.leaf = false;
    node.feature = split->feature;
    node.threshold = split->threshold;
    auto left_rows = std::vector<std::size_t>{};
    auto right_rows = std::vector<std::size_t>{};
    for (auto r : rows)
      (ds.value(r, split->feature) <= split->threshold ? left_rows : right_rows)
        .push_back(r);
    auto left = tree.nodes_.size();
    tree.nodes_.emplace_back();
    tree.nodes_.emplace_back();
    tree.nodes_[index].left = left;
    tree.nodes_[index].right = left + 1;
    work.push_back({left + 1, std::move(right_rows)});
    work.push_back({left, std::move(left_rows)});
  }
  return tree;
}

auto C45Tree::leaf_of(std::span<const double> x) const -> std::size_t {
  check_input(x);
  auto i = std::size_t{0};
  while (!nodes_[i].leaf)
    i = x[nodes_[i].feature] <= nodes_[i].threshold ? nodes_[i].left
                                                    : nodes_[i].right;
  return i;
}

auto C45Tree::predict_index(std::span<const double> x) const -> std::size_t {
  return nodes_[leaf_of(x)].label;
}

auto C45Tree::leaf_count() const -> std::size_t {
  return static_cast<std::size_t>(std::count_if(
    nodes_.begin(), nodes_.end(), [](const Node& n) { return n.leaf; }));
}

auto C45Tree::depth() const -> std::size_t {
  auto deepest = std::size_t{0};
  auto stack = std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}};
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes_[i].leaf) {
      stack.push_back({nodes_[i].left, d + 1});
      stack.push_back({nodes_[i].right, d + 1});
    }
  }
  return deepest;
}

void C45Tree::write_body(std::ostream& out) const {
  out << "nodes " << nodes_.size() << '\n';
  for (const auto& n : nodes_) {
    if (n.leaf) {
      out << "leaf " << n.label;
    } else {
      out << "split " << n.feature << ' ' << format_double(n.threshold) << ' '
          << n.left << ' ' << n.right << ' ' << n.label;
    }
    for (auto c : n.distribution)
      out << ' ' << c;
    out << '\n';
  }
}

auto C45Tree::read_body(detail::ModelReader& in,
                        std::vector<std::string> classes,
                        std::size_t n_features) -> C45Tree {
  auto tree = C45Tree{std::move(classes), n_features};
  auto k = tree.classes_.size();
  auto count = in.to_count(in.expect_n("nodes", 1)[0]);
  if (count == 0)
    in.fail("tree without nodes");
  for (std::size_t i = 0; i < count; ++i) {
    auto f = in.next_fields();
    auto node = Node{};
    auto first_count = std::size_t{0};
    if (f[0] == "leaf") {
      first_count = 2;
    } else if (f[0] == "split") {
      node.leaf = false;
      first_count = 6;
    } else {
      in.fail("expected 'leaf' or 'split'");
    }
    if (f.size() != first_count + k)
      in.fail("node has the wrong number of fields");
    if (node.leaf) {
      node.label = in.to_count(f[1]);
    } else {
      node.feature = in.to_count(f[1]);
      node.threshold = in.to_double(f[2]);
      node.left = in.to_count(f[3]);
      node.right = in.to_count(f[4]);
      node.label = in.to_count(f[5]);
      if (node.feature >= n_features || !std::isfinite(node.threshold))
        in.fail("invalid split");
      if (node.left <= i || node.right <= i || node.left >= count
          || node.right >= count)
        in.fail("child index out of range");
    }
    if (node.label >= k)
      in.fail("label index out of range");
    for (std::size_t c = 0; c < k; ++c)
      node.distribution.push_back(in.to_count(f[first_count + c]));
    tree.nodes_.push_back(std::move(node));
  }
  return tree;
}

} // namespace itcm
