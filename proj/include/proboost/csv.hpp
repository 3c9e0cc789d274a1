#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "proboost/dataset.hpp"

namespace proboost {

/// Load a comma-separated file whose final column is the class label and all
/// other columns are numeric features. A leading header row is skipped when it
/// is non-numeric. feature_columns selects a subset of feature columns by
/// index (empty = all). Numeric labels are used directly; string labels are
/// mapped to class indices in lexicographic order. Non-numeric feature cells
/// raise FormatError naming the row and column.
Dataset load_csv_labeled(const std::string& path,
                         const std::vector<std::size_t>& feature_columns = {});

}  // namespace proboost
