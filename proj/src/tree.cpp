#include "rpm/tree.hpp"

#include <algorithm>
#include <numeric>

#include "rpm/error.hpp"

namespace rpm {

std::vector<std::size_t> TrainingData::class_counts() const {
  std::vector<std::size_t> counts(num_classes(), 0);
  for (auto c : y) ++counts[c];
  return counts;
}

TrainingData make_training_data(const Dataset& d) {
  TrainingData t;
  t.x = encode_numeric(d);
  for (auto c : d.regular_indices()) t.attributes.push_back(d.attribute(c));
  t.class_labels = d.class_labels();
  t.y.reserve(d.num_rows());
  for (std::size_t r = 0; r < d.num_rows(); ++r) t.y.push_back(d.class_of(r));
  return t;
}

std::size_t TreeNode::count() const { return std::accumulate(class_counts.begin(), class_counts.end(), std::size_t{0}); }

std::size_t Tree::leaf_for(std::span<const double> row) const {
  std::size_t id = 0;
  while (!nodes[id].leaf) {
    const auto& n = nodes[id];
    const double v = row[n.attribute];
    const bool left = n.nominal ? static_cast<std::size_t>(v) == n.category : v <= n.threshold;
    id = static_cast<std::size_t>(left ? n.left : n.right);
  }
  return id;
}

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.leaf; }));
}

std::size_t Tree::depth() const {
  std::size_t d = 0;
  for (const auto& n : nodes) d = std::max(d, n.depth);
  return d;
}

double gini(std::span<const std::size_t> class_counts) {
  double total = 0.0;
  for (auto c : class_counts) total += static_cast<double>(c);
  if (total == 0.0) return 0.0;
  double sum_sq = 0.0;
  for (auto c : class_counts) {
    const double p = static_cast<double>(c) / total;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

std::size_t majority_class(std::span<const std::size_t> counts, std::span<const std::size_t> priors) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > counts[best] || (counts[c] == counts[best] && priors[c] > priors[best])) best = c;
  }
  return best;
}

namespace {

constexpr double kGainTieEpsilon = 1e-12;

// Rows live as "positions" 0..m-1 into the sample list; every attribute keeps
// its own position array sorted by value, and each node owns the same
// contiguous segment in all of them.
class Grower {
 public:
  Grower(const TrainingData& data, std::span<const std::size_t> rows, const TreeGrowth& growth)
      : data_(data), rows_(rows.begin(), rows.end()), growth_(growth), classes_(data.num_classes()) {
    const std::size_t m = rows_.size();
    labels_.resize(m);
    for (std::size_t i = 0; i < m; ++i) labels_[i] = data_.y[rows_[i]];
    priors_.assign(classes_, 0);
    for (auto c : labels_) ++priors_[c];
    sorted_.resize(data_.cols());
    for (std::size_t a = 0; a < data_.cols(); ++a) {
      auto& order = sorted_[a];
      order.resize(m);
      std::iota(order.begin(), order.end(), 0u);
      std::stable_sort(order.begin(), order.end(), [&](std::uint32_t l, std::uint32_t r) { return value(l, a) < value(r, a); });
    }
    goes_left_.resize(m);
    buffer_.resize(m);
  }

  Tree grow(Rng& rng) {
    Tree tree;
    if (!rows_.empty()) build(tree, 0, rows_.size(), 0, rng);
    return tree;
  }

  SplitChoice evaluate(std::size_t begin, std::size_t end, std::span<const std::size_t> order) const {
    SplitChoice best;
    const auto parent = segment_counts(begin, end);
    for (auto a : order) consider(a, begin, end, parent, best);
    return best;
  }

 private:
  double value(std::size_t pos, std::size_t attr) const { return data_.x.at(rows_[pos], attr); }

  std::vector<std::size_t> segment_counts(std::size_t begin, std::size_t end) const {
    std::vector<std::size_t> counts(classes_, 0);
    if (sorted_.empty()) {
      for (std::size_t i = begin; i < end; ++i) ++counts[labels_[i]];
    } else {
      for (std::size_t i = begin; i < end; ++i) ++counts[labels_[sorted_[0][i]]];
    }
    return counts;
  }

  void consider(std::size_t a, std::size_t begin, std::size_t end, const std::vector<std::size_t>& parent,
                SplitChoice& best) const {
    const std::size_t n = end - begin;
    const double nd = static_cast<double>(n);
    const double parent_gini = gini(parent);
    const auto& order = sorted_[a];
    const std::size_t min_leaf = std::max<std::size_t>(1, growth_.min_leaf);

    auto offer = [&](double gain, double threshold, std::size_t category) {
      if (!best.valid || gain > best.gain + kGainTieEpsilon) {
        best.valid = true;
        best.attribute = a;
        best.nominal = data_.nominal(a);
        best.threshold = threshold;
        best.category = category;
        best.gain = gain;
      }
    };

    if (data_.nominal(a)) {
      const std::size_t cats = data_.attributes[a].categories.size();
      std::vector<std::size_t> per_cat(cats * classes_, 0);
      std::vector<std::size_t> cat_total(cats, 0);
      for (std::size_t i = begin; i < end; ++i) {
        const auto pos = order[i];
        const auto cat = static_cast<std::size_t>(value(pos, a));
        ++per_cat[cat * classes_ + labels_[pos]];
        ++cat_total[cat];
      }
      std::vector<std::size_t> right(classes_);
      for (std::size_t cat = 0; cat < cats; ++cat) {
        const std::size_t nl = cat_total[cat];
        if (nl < min_leaf || n - nl < min_leaf) continue;
        std::span<const std::size_t> left(per_cat.data() + cat * classes_, classes_);
        for (std::size_t k = 0; k < classes_; ++k) right[k] = parent[k] - left[k];
        const double gain = parent_gini - (static_cast<double>(nl) / nd) * gini(left) -
                            (static_cast<double>(n - nl) / nd) * gini(right);
        offer(gain, 0.0, cat);
      }
      return;
    }

    std::vector<std::size_t> left(classes_, 0);
    std::vector<std::size_t> right = parent;
    for (std::size_t i = begin; i + 1 < end; ++i) {
      const auto pos = order[i];
      ++left[labels_[pos]];
      --right[labels_[pos]];
      const std::size_t nl = i - begin + 1;
      const double v = value(pos, a);
      const double next = value(order[i + 1], a);
      if (!(v < next) || nl < min_leaf || n - nl < min_leaf) continue;
      double threshold = v + (next - v) / 2.0;
      if (!(threshold < next)) threshold = v;
      const double gain = parent_gini - (static_cast<double>(nl) / nd) * gini(left) -
                          (static_cast<double>(n - nl) / nd) * gini(right);
      offer(gain, threshold, 0);
    }
  }

  std::int32_t build(Tree& tree, std::size_t begin, std::size_t end, std::size_t depth, Rng& rng) {
    const auto id = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    {
      auto& node = tree.nodes.back();
      node.depth = depth;
      node.class_counts = segment_counts(begin, end);
      node.prediction = majority_class(node.class_counts, priors_);
    }
    const auto counts = tree.nodes[static_cast<std::size_t>(id)].class_counts;
    const std::size_t n = end - begin;
    const bool pure = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) <= 1;
    const std::size_t min_leaf = std::max<std::size_t>(1, growth_.min_leaf);
    if (pure || n < 2 * min_leaf || (growth_.max_depth > 0 && depth >= growth_.max_depth) || data_.cols() == 0) {
      return id;
    }

    SplitChoice split;
    const std::size_t p = data_.cols();
    const std::size_t k = growth_.attributes_per_node;
    if (k == 0 || k >= p) {
      for (std::size_t a = 0; a < p; ++a) consider(a, begin, end, counts, split);
    } else {
      std::vector<std::size_t> order(p);
      std::iota(order.begin(), order.end(), 0);
      shuffle(std::span(order), rng);
      // Evaluate k attributes, then keep scanning until some split has positive gain.
      for (std::size_t i = 0; i < p; ++i) {
        if (i >= k && split.valid && split.gain > kGainTieEpsilon) break;
        consider(order[i], begin, end, counts, split);
      }
    }
    if (!split.valid) return id;

    partition(split, begin, end);
    std::size_t mid = begin;
    for (std::size_t i = begin; i < end; ++i) mid += goes_left_[sorted_[0][i]];

    const std::int32_t left = build(tree, begin, mid, depth + 1, rng);
    const std::int32_t right = build(tree, mid, end, depth + 1, rng);
    auto& node = tree.nodes[static_cast<std::size_t>(id)];
    node.leaf = false;
    node.attribute = split.attribute;
    node.nominal = split.nominal;
    node.threshold = split.threshold;
    node.category = split.category;
    node.left = left;
    node.right = right;
    return id;
  }

  void partition(const SplitChoice& split, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto pos = sorted_[0][i];
      const double v = value(pos, split.attribute);
      goes_left_[pos] = split.nominal ? static_cast<std::size_t>(v) == split.category : v <= split.threshold;
    }
    for (auto& order : sorted_) {
      std::size_t l = begin;
      std::size_t r = 0;
      for (std::size_t i = begin; i < end; ++i) {
        const auto pos = order[i];
        if (goes_left_[pos]) {
          order[l++] = pos;
        } else {
          buffer_[r++] = pos;
        }
      }
      std::copy(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(r), order.begin() + static_cast<std::ptrdiff_t>(l));
    }
  }

  const TrainingData& data_;
  std::vector<std::size_t> rows_;
  TreeGrowth growth_;
  std::size_t classes_;
  std::vector<std::size_t> labels_;
  std::vector<std::size_t> priors_;
  std::vector<std::vector<std::uint32_t>> sorted_;
  std::vector<std::uint8_t> goes_left_;
  std::vector<std::uint32_t> buffer_;
};

}  // namespace

Tree grow_tree(const TrainingData& data, std::span<const std::size_t> rows, const TreeGrowth& growth, Rng& rng) {
  if (rows.empty()) throw DataError("cannot grow a tree on an empty dataset");
  Grower grower(data, rows, growth);
  return grower.grow(rng);
}

SplitChoice best_split(const TrainingData& data, std::span<const std::size_t> rows,
                       std::span<const std::size_t> order, std::size_t min_leaf) {
  TreeGrowth growth;
  growth.min_leaf = min_leaf;
  Grower grower(data, rows, growth);
  return grower.evaluate(0, rows.size(), order);
}

}  // namespace rpm
