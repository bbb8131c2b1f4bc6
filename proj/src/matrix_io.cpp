#include "bpperm/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bpperm {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_entry(std::string_view token, std::size_t line) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (token.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw ParseError("line " + std::to_string(line) + ": cannot parse '" + std::string(token) +
                     "' as a number");
  }
  if (value < 0.0) {
    throw DomainError("line " + std::to_string(line) + ": negative entry " + std::string(token));
  }
  return value;
}

WeightMatrix parse_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    while (true) {
      const auto comma = line.find(',');
      row.push_back(parse_entry(line.substr(0, comma), line_no));
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ShapeError("matrix file contains no rows");
  return WeightMatrix(SquareMatrix::from_rows(rows));
}

WeightMatrix parse_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("p") || !doc["p"].is_array()) {
    throw ParseError("JSON matrix must be an object with an array field \"p\"");
  }
  std::vector<std::vector<double>> rows;
  std::size_t line = 0;
  for (const auto& r : doc["p"]) {
    ++line;
    if (!r.is_array()) throw ParseError("row " + std::to_string(line) + " is not an array");
    std::vector<double> row;
    for (const auto& v : r) {
      if (!v.is_number()) throw ParseError("row " + std::to_string(line) + ": non-numeric entry");
      const double x = v.get<double>();
      if (x < 0.0) throw DomainError("row " + std::to_string(line) + ": negative entry");
      row.push_back(x);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ShapeError("matrix has no rows");
  double temperature = 1.0;
  if (doc.contains("temperature")) {
    const auto& t = doc["temperature"];
    if (t.is_number()) {
      temperature = t.get<double>();
    } else if (t.is_string() && (t.get<std::string>() == "inf" || t.get<std::string>() == "infinity")) {
      temperature = kInfiniteTemperature;
    } else {
      throw ParseError("\"temperature\" must be a positive number");
    }
    if (!(temperature > 0.0)) throw DomainError("\"temperature\" must be positive");
  }
  return WeightMatrix(SquareMatrix::from_rows(rows), temperature);
}

}  // namespace

MatrixFormat parse_matrix_format(std::string_view name) {
  if (name == "csv") return MatrixFormat::csv;
  if (name == "json") return MatrixFormat::json;
  throw ParseError("unknown matrix format '" + std::string(name) + "'");
}

MatrixFormat guess_matrix_format(const std::filesystem::path& path) {
  return path.extension() == ".json" ? MatrixFormat::json : MatrixFormat::csv;
}

WeightMatrix parse_matrix(std::string_view text, MatrixFormat format) {
  return format == MatrixFormat::json ? parse_json(text) : parse_csv(text);
}

WeightMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrix(buf.str(), format);
}

std::string to_csv(const SquareMatrix& m) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < m.n(); ++i) {
    for (std::size_t j = 0; j < m.n(); ++j) {
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, m(i, j));
      (void)ec;
      if (j) out += ',';
      out.append(buf, ptr);
    }
    out += '\n';
  }
  return out;
}

}  // namespace bpperm
