#include "eselect/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "eselect/errors.hpp"

namespace eselect {

namespace {

char sniff_delimiter(const std::string& line) {
  if (line.find(',') != std::string::npos) return ',';
  if (line.find(';') != std::string::npos) return ';';
  if (line.find('\t') != std::string::npos) return '\t';
  return ' ';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> cells;
  if (delim == ' ') {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) cells.push_back(line.substr(i, j - i));
      i = j;
    }
    return cells;
  }
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return cells;
}

double parse_number(std::string_view cell, long row, std::size_t col,
                    const std::string& name) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || cell.empty()) {
    throw DataError(name + ": row " + std::to_string(row) + ", column " +
                    std::to_string(col + 1) + ": not a number: '" +
                    std::string(cell) + "'");
  }
  if (!std::isfinite(value)) {
    throw DataError(name + ": row " + std::to_string(row) + ", column " +
                    std::to_string(col + 1) + ": non-finite value");
  }
  return value;
}

}  // namespace

Dataset ingest(std::istream& in, const std::string& name) {
  std::string line;
  long row = 0;

  // Header: declares the horizon via the column count.
  std::string header;
  while (std::getline(in, line)) {
    ++row;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    header = std::string(t);
    break;
  }
  if (header.empty()) {
    throw DataError(name + ": no header row found");
  }
  const char delim = sniff_delimiter(header);
  const auto header_cells = split(header, delim);
  if (header_cells.size() < 4 || (header_cells.size() - 1) % 3 != 0) {
    throw DataError(name + ": header must declare a step column plus three "
                    "equally sized horizon blocks");
  }
  const auto horizon = static_cast<int>((header_cells.size() - 1) / 3);
  const std::size_t expected_cells = header_cells.size();

  Dataset data;
  data.horizon = horizon;

  bool have_prev_step = false;
  std::int64_t prev_step = 0;
  std::vector<double> prev_y;

  while (std::getline(in, line)) {
    ++row;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cells = split(t, delim);
    if (cells.size() != expected_cells) {
      throw DataError(name + ": row " + std::to_string(row) + ": expected " +
                      std::to_string(expected_cells) + " cells, got " +
                      std::to_string(cells.size()));
    }

    ForecastTriple triple;
    const double step_value = parse_number(cells[0], row, 0, name);
    triple.step = static_cast<std::int64_t>(step_value);
    if (static_cast<double>(triple.step) != step_value) {
      throw DataError(name + ": row " + std::to_string(row) +
                      ": step index must be an integer");
    }
    if (have_prev_step && triple.step <= prev_step) {
      throw DataError(name + ": row " + std::to_string(row) +
                      ": step indices must increase strictly (" +
                      std::to_string(triple.step) + " after " +
                      std::to_string(prev_step) + ")");
    }

    const auto h = static_cast<std::size_t>(horizon);
    triple.p.resize(h);
    triple.q.resize(h);
    triple.y.resize(h);
    for (std::size_t k = 0; k < h; ++k) {
      triple.p[k] = parse_number(cells[1 + k], row, 1 + k, name);
      triple.q[k] = parse_number(cells[1 + h + k], row, 1 + h + k, name);
      triple.y[k] = parse_number(cells[1 + 2 * h + k], row, 1 + 2 * h + k, name);
    }
    triple.validate();

    if (have_prev_step && triple.step == prev_step + 1) {
      for (std::size_t k = 0; k + 1 < h; ++k) {
        data.max_shift_mismatch = std::max(
            data.max_shift_mismatch, std::fabs(prev_y[k + 1] - triple.y[k]));
      }
    }
    prev_step = triple.step;
    prev_y = triple.y;
    have_prev_step = true;
    data.triples.push_back(std::move(triple));
  }

  if (data.triples.empty()) {
    throw DataError(name + ": no data rows");
  }
  return data;
}

Dataset ingest(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open input file: " + path);
  }
  return ingest(in, path);
}

}  // namespace eselect
