#pragma once

#include <string>
#include <vector>

#include "recap/types.hpp"

namespace recap {

// Reads a header CSV into a Dataset. Columns: optional "id", the named
// covariate columns, and the named binary list columns (strict 0/1).
// Rows with missing or malformed values fail with a row-numbered error.
Dataset read_dataset_csv(const std::string& path,
                         const std::vector<std::string>& covariate_columns,
                         const std::vector<std::string>& list_columns);

// Quote-aware split of one CSV record.
std::vector<std::string> split_csv_line(const std::string& line);

std::vector<std::string> read_csv_header(const std::string& path);

void write_dataset_csv(const Dataset& data, const std::string& path);

}  // namespace recap
