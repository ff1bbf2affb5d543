#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rpm {

enum class AttributeKind { numeric, nominal };
enum class AttributeRole { regular, target };

struct AttributeMeta {
  std::string name;
  AttributeKind kind = AttributeKind::numeric;
  std::vector<std::string> categories;  // nominal only
  AttributeRole role = AttributeRole::regular;

  bool is_nominal() const { return kind == AttributeKind::nominal; }
  bool is_target() const { return role == AttributeRole::target; }
  std::optional<std::size_t> category_index(std::string_view label) const;

  friend bool operator==(const AttributeMeta&, const AttributeMeta&) = default;
};

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return v != v; }

/// Instance-major table of cells with exactly one nominal target attribute.
///
/// Cells are doubles: numeric values as-is, nominal values as their category
/// index, missing cells as NaN. Instances are immutable once constructed;
/// every transformation returns a new Dataset.
class Dataset {
 public:
  Dataset() = default;
  /// Validates every invariant and throws DataError on violation.
  Dataset(std::vector<AttributeMeta> attributes, std::vector<double> cells,
          std::string provenance = {});

  std::size_t num_rows() const { return rows_; }
  std::size_t num_attributes() const { return attributes_.size(); }
  std::size_t num_regular() const { return attributes_.empty() ? 0 : attributes_.size() - 1; }

  const std::vector<AttributeMeta>& attributes() const { return attributes_; }
  const AttributeMeta& attribute(std::size_t col) const { return attributes_.at(col); }
  std::size_t target_index() const { return target_; }
  const AttributeMeta& target() const { return attributes_[target_]; }
  const std::vector<std::string>& class_labels() const { return attributes_[target_].categories; }
  std::size_t num_classes() const { return class_labels().size(); }

  std::optional<std::size_t> find(std::string_view name) const;
  /// Throws DataError for unknown names.
  std::size_t index_of(std::string_view name) const;

  double at(std::size_t row, std::size_t col) const { return cells_[row * attributes_.size() + col]; }
  std::span<const double> row(std::size_t r) const {
    return {cells_.data() + r * attributes_.size(), attributes_.size()};
  }
  std::size_t class_of(std::size_t row) const { return static_cast<std::size_t>(at(row, target_)); }
  std::vector<std::size_t> class_counts() const;

  std::vector<std::size_t> regular_indices() const;
  std::vector<std::string> regular_names() const;

  const std::vector<double>& cells() const { return cells_; }
  const std::string& provenance() const { return provenance_; }
  Dataset with_provenance(std::string provenance) const;

  bool has_missing() const;
  /// Rows in the given order; indices may repeat.
  Dataset select_rows(std::span<const std::size_t> rows) const;

  /// Structural equality over attributes and cells (NaN equals NaN); provenance ignored.
  friend bool operator==(const Dataset& a, const Dataset& b);

 private:
  std::vector<AttributeMeta> attributes_;
  std::vector<double> cells_;
  std::size_t rows_ = 0;
  std::size_t target_ = 0;
  std::string provenance_;
};

/// Dense row-major matrix of encoded regular attributes (target excluded).
struct NumericMatrix {
  std::vector<std::string> names;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }
  friend bool operator==(const NumericMatrix&, const NumericMatrix&) = default;
};

/// One row per regular attribute, holding that attribute's values across all instances.
struct AttributeMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  bool normalized = false;
  // Normalization record; population mean and std of each row before z-scoring.
  std::vector<double> means;
  std::vector<double> stds;

  std::size_t num_rows() const { return rows.size(); }
  std::size_t row_length() const { return rows.empty() ? 0 : rows.front().size(); }
};

/// Mean imputation for numeric attributes, mode imputation for nominal ones.
/// Mode ties resolve to the lowest category index.
Dataset impute_missing(const Dataset& d);

/// Regular attributes as reals; nominal cells become their category index.
NumericMatrix encode_numeric(const Dataset& d);

/// Transposes the regular attributes; optionally z-scores every row (constant rows become zeros).
AttributeMatrix transpose(const Dataset& d, bool normalize);

/// Rebuilds an instance-major dataset from an attribute matrix, undoing any
/// normalization. Metadata and target values are taken from `source`, which
/// must contain every attribute named by `m`.
Dataset retranspose(const AttributeMatrix& m, const Dataset& source);

/// The named regular attributes plus the target, in source column order.
Dataset project_attributes(const Dataset& d, std::span<const std::string> names);

}  // namespace rpm
