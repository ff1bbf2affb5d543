#include "rpm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <unordered_set>

#include "rpm/error.hpp"

namespace rpm {

std::optional<std::size_t> AttributeMeta::category_index(std::string_view label) const {
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (categories[i] == label) return i;
  }
  return std::nullopt;
}

Dataset::Dataset(std::vector<AttributeMeta> attributes, std::vector<double> cells, std::string provenance)
    : attributes_(std::move(attributes)), cells_(std::move(cells)), provenance_(std::move(provenance)) {
  if (attributes_.empty()) throw DataError("dataset has no attributes");
  if (cells_.size() % attributes_.size() != 0) {
    throw DataError("cell count is not a multiple of the attribute count");
  }
  rows_ = cells_.size() / attributes_.size();

  std::unordered_set<std::string> names;
  std::size_t targets = 0;
  for (std::size_t c = 0; c < attributes_.size(); ++c) {
    const auto& a = attributes_[c];
    if (!names.insert(a.name).second) throw DataError("duplicate attribute name '" + a.name + "'");
    if (a.is_nominal()) {
      if (a.categories.empty()) throw DataError("nominal attribute '" + a.name + "' has no categories");
      std::unordered_set<std::string> seen(a.categories.begin(), a.categories.end());
      if (seen.size() != a.categories.size()) {
        throw DataError("nominal attribute '" + a.name + "' has duplicate categories");
      }
    }
    if (a.is_target()) {
      ++targets;
      target_ = c;
      if (!a.is_nominal()) throw DataError("target attribute '" + a.name + "' must be nominal");
    }
  }
  if (targets != 1) throw DataError("dataset must have exactly one target attribute");

  const std::size_t width = attributes_.size();
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const double v = cells_[r * width + c];
      const auto& a = attributes_[c];
      if (is_missing(v)) {
        if (a.is_target()) throw DataError("target attribute '" + a.name + "' has missing cells");
        continue;
      }
      if (a.is_nominal()) {
        if (v < 0 || v != std::floor(v) || v >= static_cast<double>(a.categories.size())) {
          throw DataError("category index out of range in attribute '" + a.name + "'");
        }
      }
    }
  }
}

std::optional<std::size_t> Dataset::find(std::string_view name) const {
  for (std::size_t c = 0; c < attributes_.size(); ++c) {
    if (attributes_[c].name == name) return c;
  }
  return std::nullopt;
}

std::size_t Dataset::index_of(std::string_view name) const {
  if (auto c = find(name)) return *c;
  throw DataError("unknown attribute '" + std::string(name) + "'");
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(num_classes(), 0);
  for (std::size_t r = 0; r < rows_; ++r) ++counts[class_of(r)];
  return counts;
}

std::vector<std::size_t> Dataset::regular_indices() const {
  std::vector<std::size_t> out;
  out.reserve(num_regular());
  for (std::size_t c = 0; c < attributes_.size(); ++c) {
    if (c != target_) out.push_back(c);
  }
  return out;
}

std::vector<std::string> Dataset::regular_names() const {
  std::vector<std::string> out;
  for (auto c : regular_indices()) out.push_back(attributes_[c].name);
  return out;
}

Dataset Dataset::with_provenance(std::string provenance) const {
  Dataset copy = *this;
  copy.provenance_ = std::move(provenance);
  return copy;
}

bool Dataset::has_missing() const {
  return std::any_of(cells_.begin(), cells_.end(), [](double v) { return is_missing(v); });
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  const std::size_t width = attributes_.size();
  std::vector<double> cells;
  cells.reserve(rows.size() * width);
  for (auto r : rows) {
    if (r >= rows_) throw DataError("row index out of range");
    auto src = row(r);
    cells.insert(cells.end(), src.begin(), src.end());
  }
  Dataset out;
  out.attributes_ = attributes_;
  out.cells_ = std::move(cells);
  out.rows_ = rows.size();
  out.target_ = target_;
  out.provenance_ = provenance_;
  return out;
}

bool operator==(const Dataset& a, const Dataset& b) {
  if (a.attributes_ != b.attributes_ || a.cells_.size() != b.cells_.size()) return false;
  // Bitwise comparison so missing cells compare equal.
  return a.cells_.empty() ||
         std::memcmp(a.cells_.data(), b.cells_.data(), a.cells_.size() * sizeof(double)) == 0;
}

Dataset impute_missing(const Dataset& d) {
  if (!d.has_missing()) return d;
  const std::size_t width = d.num_attributes();
  const std::size_t n = d.num_rows();
  std::vector<double> cells = d.cells();
  for (std::size_t c = 0; c < width; ++c) {
    const auto& a = d.attribute(c);
    std::size_t present = 0;
    double sum = 0.0;
    std::vector<std::size_t> counts(a.categories.size(), 0);
    for (std::size_t r = 0; r < n; ++r) {
      const double v = cells[r * width + c];
      if (is_missing(v)) continue;
      ++present;
      if (a.is_nominal()) {
        ++counts[static_cast<std::size_t>(v)];
      } else {
        sum += v;
      }
    }
    if (present == n) continue;
    if (present == 0) throw DataError("attribute '" + a.name + "' is entirely missing");
    double fill = 0.0;
    if (a.is_nominal()) {
      fill = static_cast<double>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    } else {
      fill = sum / static_cast<double>(present);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (is_missing(cells[r * width + c])) cells[r * width + c] = fill;
    }
  }
  return Dataset(d.attributes(), std::move(cells), d.provenance());
}

NumericMatrix encode_numeric(const Dataset& d) {
  const auto cols = d.regular_indices();
  NumericMatrix m;
  m.rows = d.num_rows();
  m.cols = cols.size();
  m.values.reserve(m.rows * m.cols);
  for (auto c : cols) m.names.push_back(d.attribute(c).name);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (auto c : cols) {
      const double v = d.at(r, c);
      if (is_missing(v)) throw DataError("cannot encode missing cell in '" + d.attribute(c).name + "'");
      m.values.push_back(v);
    }
  }
  return m;
}

AttributeMatrix transpose(const Dataset& d, bool normalize) {
  const auto cols = d.regular_indices();
  if (cols.empty()) throw DataError("dataset has no regular attributes to transpose");
  const std::size_t n = d.num_rows();
  AttributeMatrix m;
  m.normalized = normalize;
  for (auto c : cols) {
    m.names.push_back(d.attribute(c).name);
    std::vector<double> values(n);
    for (std::size_t r = 0; r < n; ++r) {
      values[r] = d.at(r, c);
      if (is_missing(values[r])) {
        throw DataError("cannot transpose missing cell in '" + d.attribute(c).name + "'");
      }
    }
    if (normalize) {
      const double mean = n ? std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n) : 0.0;
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      const double sd = n ? std::sqrt(ss / static_cast<double>(n)) : 0.0;
      // Relative threshold so rounding noise in a constant column is not amplified.
      const bool constant = sd <= 1e-12 * std::max(1.0, std::abs(mean));
      for (double& v : values) v = constant ? 0.0 : (v - mean) / sd;
      m.means.push_back(mean);
      m.stds.push_back(constant ? 0.0 : sd);
    }
    m.rows.push_back(std::move(values));
  }
  return m;
}

Dataset retranspose(const AttributeMatrix& m, const Dataset& source) {
  if (m.row_length() != source.num_rows()) {
    throw DataError("attribute matrix row length does not match the source instance count");
  }
  Dataset projected = project_attributes(source, m.names);
  const std::size_t width = projected.num_attributes();
  std::vector<double> cells = projected.cells();
  for (std::size_t i = 0; i < m.names.size(); ++i) {
    const std::size_t col = projected.index_of(m.names[i]);
    for (std::size_t r = 0; r < projected.num_rows(); ++r) {
      double v = m.rows[i][r];
      if (m.normalized) v = m.stds[i] == 0.0 ? m.means[i] : v * m.stds[i] + m.means[i];
      if (projected.attribute(col).is_nominal()) v = std::round(v);
      cells[r * width + col] = v;
    }
  }
  return Dataset(projected.attributes(), std::move(cells), source.provenance());
}

Dataset project_attributes(const Dataset& d, std::span<const std::string> names) {
  if (names.empty()) throw DataError("attribute projection needs at least one attribute");
  std::vector<bool> keep(d.num_attributes(), false);
  for (const auto& name : names) {
    const std::size_t c = d.index_of(name);
    if (c == d.target_index()) throw DataError("projection names must exclude the target '" + name + "'");
    if (keep[c]) throw DataError("attribute '" + name + "' listed twice in projection");
    keep[c] = true;
  }
  keep[d.target_index()] = true;
  // Source column order is preserved.
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < keep.size(); ++c) {
    if (keep[c]) cols.push_back(c);
  }

  std::vector<AttributeMeta> attrs;
  for (auto c : cols) attrs.push_back(d.attribute(c));
  std::vector<double> cells;
  cells.reserve(d.num_rows() * cols.size());
  for (std::size_t r = 0; r < d.num_rows(); ++r) {
    for (auto c : cols) cells.push_back(d.at(r, c));
  }
  return Dataset(std::move(attrs), std::move(cells), d.provenance());
}

}  // namespace rpm
