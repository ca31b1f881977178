#pragma once

#include "redmat/assembly.hpp"
#include "redmat/redundancy.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace redmat {

inline constexpr int kResultFormatVersion = 1;

/// CSV with header `element_id,mode_label,r_ii`, one row per load mode.
void write_diagonal_csv(std::ostream& out, const RedundancyResult& result);

/// Coordinate text in the MatrixMarket layout (1-based, exact zeros
/// omitted). Comment lines before the size line give the row provenance;
/// column provenance is written too when col_tags is non-empty.
void write_coordinate(std::ostream& out, const Eigen::MatrixXd& M, const std::vector<RowTag>& row_tags,
                      const std::vector<RowTag>& col_tags);

void write_coordinate(std::ostream& out, const SparseMatrix& M, const std::vector<RowTag>& row_tags);

/// Writes <prefix>_A.mtx (compatibility matrix) and <prefix>_C.mtx
/// (material diagonal as an n_q x 1 array).
void dump_system(const AssembledSystem& sys, const std::filesystem::path& prefix);

} // namespace redmat
