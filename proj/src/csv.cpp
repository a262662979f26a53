#include "qts/csv.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qts/error.hpp"

namespace qts {

namespace {

std::string trim(const std::string& s) {
  const auto from = s.find_first_not_of(" \t\r\n");
  if (from == std::string::npos) return "";
  const auto to = s.find_last_not_of(" \t\r\n");
  return s.substr(from, to - from + 1);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& col) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (cell.empty() || end != begin + cell.size())
    throw ValidationError("row " + std::to_string(row) + ": column '" + col +
                          "' has non-numeric value '" + cell + "'");
  return v;
}

}  // namespace

TimeSeries ingest_csv(const std::string& path,
                      const std::optional<std::string>& time_col,
                      const std::vector<std::string>& value_cols) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open input file '" + path + "'");

  std::string line;
  if (!std::getline(in, line))
    throw ValidationError("input file '" + path + "' is empty; a header row is required");
  const auto header = split_row(line);

  auto column_index = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw ValidationError("column '" + name + "' not found in header");
    return std::size_t(it - header.begin());
  };

  std::optional<std::size_t> time_idx;
  if (time_col) time_idx = column_index(*time_col);

  std::vector<std::size_t> keep;
  std::vector<std::string> names;
  if (value_cols.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (time_idx && i == *time_idx) continue;
      keep.push_back(i);
      names.push_back(header[i]);
    }
  } else {
    for (const auto& name : value_cols) {
      keep.push_back(column_index(name));
      names.push_back(name);
    }
  }
  if (keep.empty()) throw ValidationError("no value columns selected");

  std::vector<double> timestamps;
  std::vector<double> values;
  std::size_t row = 1;  // header was row 1
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size())
      throw ValidationError("row " + std::to_string(row) + ": expected " +
                            std::to_string(header.size()) + " cells, got " +
                            std::to_string(cells.size()));
    if (time_idx)
      timestamps.push_back(parse_cell(cells[*time_idx], row, header[*time_idx]));
    for (std::size_t i = 0; i < keep.size(); ++i)
      values.push_back(parse_cell(cells[keep[i]], row, names[i]));
  }
  if (values.empty())
    throw ValidationError("input file '" + path + "' has no data rows");

  const std::size_t dim = keep.size();
  if (!time_idx) {
    timestamps.resize(values.size() / dim);
    for (std::size_t i = 0; i < timestamps.size(); ++i) timestamps[i] = double(i);
  }
  for (std::size_t i = 1; i < timestamps.size(); ++i)
    if (timestamps[i] <= timestamps[i - 1])
      throw ValidationError("row " + std::to_string(i + 2) +
                            ": timestamps must be strictly increasing");

  return make_time_series(std::move(timestamps), std::move(values), dim);
}

}  // namespace qts
