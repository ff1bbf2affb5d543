#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "rpm/error.hpp"
#include "rpm/io.hpp"

namespace rpm {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

bool is_missing_cell(std::string_view cell, const std::string& token) {
  cell = trim(cell);
  return cell.empty() || cell == token;
}

// Numeric-aware ordering: purely numeric labels sort by value, everything else lexicographically.
void sort_categories(std::vector<std::string>& cats) {
  const bool numeric = std::all_of(cats.begin(), cats.end(), [](const std::string& c) {
    return parse_number(c).has_value();
  });
  if (numeric) {
    std::stable_sort(cats.begin(), cats.end(), [](const std::string& a, const std::string& b) {
      return *parse_number(a) < *parse_number(b);
    });
  } else {
    std::sort(cats.begin(), cats.end());
  }
}

}  // namespace

std::optional<std::size_t> RawTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

RawTable parse_csv(std::string_view text, const CsvOptions& options) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool quoted = false;  // current field was quoted; keep it verbatim
  std::size_t line = 1;

  auto end_field = [&] {
    record.emplace_back(quoted ? field : std::string(trim(field)));
    field.clear();
    quoted = false;
  };
  auto end_record = [&] {
    const bool blank = record.empty() && !quoted && trim(field).empty();
    end_field();
    if (!blank) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
    } else if (ch == '"' && trim(field).empty() && !quoted) {
      field.clear();
      in_quotes = true;
      quoted = true;
    } else if (ch == options.delimiter) {
      end_field();
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_record();
      ++line;
    } else if (!quoted) {
      field.push_back(ch);
    }
  }
  if (in_quotes) throw DataError("unterminated quoted field near line " + std::to_string(line));
  if (quoted || !field.empty() || !record.empty()) end_record();

  if (records.empty()) throw DataError("CSV input has no header row");
  RawTable table;
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw DataError("ragged CSV row " + std::to_string(r + 1) + ": expected " +
                      std::to_string(table.header.size()) + " fields, found " +
                      std::to_string(records[r].size()));
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

RawTable read_csv_table(const std::filesystem::path& path, const CsvOptions& options) {
  return parse_csv(read_text_file(path), options);
}

Dataset build_dataset(const RawTable& table, const SchemaOptions& options) {
  const auto target_col = table.column(options.target);
  if (!target_col) throw DataError("target column '" + options.target + "' not found");
  const std::unordered_set<std::string> force_nominal(options.force_nominal.begin(), options.force_nominal.end());
  for (const auto& name : options.force_nominal) {
    if (!table.column(name)) throw DataError("column '" + name + "' not found");
  }

  const std::size_t width = table.header.size();
  const std::size_t n = table.rows.size();
  std::vector<AttributeMeta> attrs(width);
  std::vector<std::unordered_map<std::string, std::size_t>> lookup(width);

  for (std::size_t c = 0; c < width; ++c) {
    auto& a = attrs[c];
    a.name = table.header[c];
    a.role = c == *target_col ? AttributeRole::target : AttributeRole::regular;
    bool numeric = true;
    for (std::size_t r = 0; r < n && numeric; ++r) {
      const auto& cell = table.rows[r][c];
      if (is_missing_cell(cell, options.missing_token)) continue;
      numeric = parse_number(cell).has_value();
    }
    const auto declared = options.declared_categories.find(a.name);
    const bool nominal = a.is_target() || !numeric || force_nominal.count(a.name) ||
                         declared != options.declared_categories.end();
    if (!nominal) continue;

    a.kind = AttributeKind::nominal;
    if (declared != options.declared_categories.end()) {
      a.categories = declared->second;
    } else {
      std::unordered_set<std::string> seen;
      for (std::size_t r = 0; r < n; ++r) {
        const auto& cell = table.rows[r][c];
        if (is_missing_cell(cell, options.missing_token)) continue;
        const std::string label(trim(cell));
        if (seen.insert(label).second) a.categories.push_back(label);
      }
      sort_categories(a.categories);
    }
    if (a.categories.empty()) {
      if (a.is_target()) throw DataError("target column '" + a.name + "' has no values");
      // Entirely missing column: keep a placeholder category so the schema is valid.
      a.categories.push_back("?");
    }
    for (std::size_t i = 0; i < a.categories.size(); ++i) lookup[c][a.categories[i]] = i;
  }

  std::vector<double> cells;
  cells.reserve(n * width);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const auto& cell = table.rows[r][c];
      if (is_missing_cell(cell, options.missing_token)) {
        if (attrs[c].is_target()) {
          throw DataError("target column '" + attrs[c].name + "' has a missing cell in row " +
                          std::to_string(r + 2));
        }
        cells.push_back(kMissing);
      } else if (attrs[c].is_nominal()) {
        const auto it = lookup[c].find(std::string(trim(cell)));
        if (it == lookup[c].end()) {
          throw DataError("value '" + cell + "' is not a declared category of '" + attrs[c].name + "'");
        }
        cells.push_back(static_cast<double>(it->second));
      } else {
        cells.push_back(*parse_number(cell));
      }
    }
  }
  return Dataset(std::move(attrs), std::move(cells), options.provenance);
}

Dataset load_csv(const std::filesystem::path& path, const LoadOptions& options) {
  const RawTable table = read_csv_table(path, CsvOptions{options.delimiter});
  SchemaOptions schema;
  schema.target = options.target;
  schema.missing_token = options.missing_token;
  schema.provenance = path.filename().string();
  return build_dataset(table, schema);
}

}  // namespace rpm
