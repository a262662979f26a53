#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qts/encoding.hpp"

namespace qts {

// Reads a comma-separated file with a mandatory header row. `value_cols`
// names the columns to keep, in order; an empty list keeps every column
// except the time column. Without a time column rows are indexed 0..n-1.
// Unreadable cells and structural problems are reported with the 1-based
// row number of the offending line.
TimeSeries ingest_csv(const std::string& path,
                      const std::optional<std::string>& time_col,
                      const std::vector<std::string>& value_cols);

}  // namespace qts
