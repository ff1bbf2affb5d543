#include <algorithm>
#include <cctype>
#include <sstream>

#include "rpm/error.hpp"
#include "rpm/io.hpp"

namespace rpm {

namespace {

std::string trim_copy(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string unquote(std::string s) {
  s = trim_copy(s);
  if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

// Splits on commas outside single or double quotes.
std::vector<std::string> split_values(std::string_view line) {
  std::vector<std::string> out;
  std::string current;
  char quote = 0;
  for (char ch : line) {
    if (quote) {
      if (ch == quote) quote = 0;
      current.push_back(ch);
    } else if (ch == '\'' || ch == '"') {
      quote = ch;
      current.push_back(ch);
    } else if (ch == ',') {
      out.push_back(unquote(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  out.push_back(unquote(current));
  return out;
}

// Reads the attribute name token at the start of `rest`, returning it and advancing `rest`.
std::string take_name(std::string_view& rest) {
  rest = rest.substr(std::min(rest.size(), rest.find_first_not_of(" \t")));
  if (rest.empty()) throw DataError("attribute declaration without a name");
  if (rest.front() == '\'' || rest.front() == '"') {
    const char q = rest.front();
    const auto close = rest.find(q, 1);
    if (close == std::string_view::npos) throw DataError("unterminated quoted attribute name");
    std::string name(rest.substr(1, close - 1));
    rest.remove_prefix(close + 1);
    return name;
  }
  const auto end = rest.find_first_of(" \t");
  std::string name(rest.substr(0, end));
  rest.remove_prefix(end == std::string_view::npos ? rest.size() : end);
  return name;
}

}  // namespace

ArffTable parse_arff(std::string_view text) {
  ArffTable out;
  std::istringstream in{std::string(text)};
  std::string raw;
  bool in_data = false;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim_copy(raw);
    if (line.empty() || line.front() == '%') continue;
    if (!in_data) {
      if (line.front() != '@') throw DataError("unexpected content before @data at line " + std::to_string(line_no));
      const auto space = line.find_first_of(" \t");
      const std::string keyword = lower(line.substr(0, space));
      std::string_view rest = space == std::string::npos ? std::string_view{} : std::string_view(line).substr(space);
      if (keyword == "@relation") {
        out.relation = unquote(std::string(rest));
      } else if (keyword == "@attribute") {
        out.table.header.push_back(take_name(rest));
        const std::string type = trim_copy(rest);
        if (!type.empty() && type.front() == '{') {
          const auto close = type.rfind('}');
          if (close == std::string::npos) throw DataError("unterminated nominal declaration at line " + std::to_string(line_no));
          auto cats = split_values(std::string_view(type).substr(1, close - 1));
          out.nominal.emplace_back(std::move(cats));
        } else {
          const std::string t = lower(type);
          if (t != "numeric" && t != "real" && t != "integer") {
            throw DataError("unsupported attribute type '" + type + "' at line " + std::to_string(line_no));
          }
          out.nominal.emplace_back(std::nullopt);
        }
      } else if (keyword == "@data") {
        in_data = true;
      } else {
        throw DataError("unknown declaration '" + keyword + "' at line " + std::to_string(line_no));
      }
      continue;
    }
    auto values = split_values(line);
    if (values.size() != out.table.header.size()) {
      throw DataError("ragged data row at line " + std::to_string(line_no) + ": expected " +
                      std::to_string(out.table.header.size()) + " values");
    }
    out.table.rows.push_back(std::move(values));
  }
  if (out.table.header.empty()) throw DataError("no @attribute declarations found");
  if (!in_data) throw DataError("no @data section found");
  return out;
}

ArffTable read_arff(const std::filesystem::path& path) { return parse_arff(read_text_file(path)); }

Dataset load_arff(const std::filesystem::path& path, const std::string& target) {
  const ArffTable arff = read_arff(path);
  SchemaOptions schema;
  schema.target = target.empty() ? arff.table.header.back() : target;
  schema.provenance = path.filename().string();
  for (std::size_t c = 0; c < arff.nominal.size(); ++c) {
    if (arff.nominal[c]) schema.declared_categories[arff.table.header[c]] = *arff.nominal[c];
  }
  return build_dataset(arff.table, schema);
}

}  // namespace rpm
