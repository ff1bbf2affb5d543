#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rpm/dataset.hpp"

namespace rpm {

/// Untyped table: header plus string cells, as read from disk.
struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const;
};

struct CsvOptions {
  char delimiter = ',';
};

/// RFC-4180-style parsing: double-quoted fields, "" escapes, CRLF or LF line ends.
/// Throws DataError on ragged rows or a missing header.
RawTable parse_csv(std::string_view text, const CsvOptions& options = {});
RawTable read_csv_table(const std::filesystem::path& path, const CsvOptions& options = {});

struct SchemaOptions {
  std::string target;
  std::string missing_token = "?";
  // Integer-coded columns default to numeric; list them here to make them nominal.
  std::vector<std::string> force_nominal;
  // Declared category order (e.g. from ARFF headers); otherwise categories are sorted.
  std::map<std::string, std::vector<std::string>> declared_categories;
  std::string provenance;
};

/// Infers column kinds and builds a typed Dataset. A column is numeric only if
/// every non-missing cell parses as a number; the target is always nominal.
/// Empty cells and the missing token are missing.
Dataset build_dataset(const RawTable& table, const SchemaOptions& options);

struct LoadOptions {
  char delimiter = ',';
  std::string missing_token = "?";
  std::string target;
};

Dataset load_csv(const std::filesystem::path& path, const LoadOptions& options);

/// Attribute-relation text format: @relation / @attribute / @data sections,
/// numeric and enumerated nominal attributes, '?' for missing.
struct ArffTable {
  std::string relation;
  RawTable table;
  std::vector<std::optional<std::vector<std::string>>> nominal;  // per column
};

ArffTable parse_arff(std::string_view text);
ArffTable read_arff(const std::filesystem::path& path);

/// Target defaults to the last declared attribute when `target` is empty.
Dataset load_arff(const std::filesystem::path& path, const std::string& target = {});

std::string read_text_file(const std::filesystem::path& path);

}  // namespace rpm
