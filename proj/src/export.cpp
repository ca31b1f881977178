#include "redmat/export.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

namespace redmat {

namespace {

void provenance(std::ostream& out, const char* axis, const std::vector<RowTag>& tags)
{
    out << "% " << axis << " provenance: index element_id mode_label\n";
    for (std::size_t i = 0; i < tags.size(); ++i)
        out << "% " << axis << ' ' << i + 1 << ' ' << tags[i].element_id << ' ' << to_string(tags[i].mode) << '\n';
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot write " + path.string());
    out << std::setprecision(17);
    return out;
}

} // namespace

void write_diagonal_csv(std::ostream& out, const RedundancyResult& result)
{
    const auto old = out.precision(17);
    out << "element_id,mode_label,r_ii\n";
    for (Eigen::Index i = 0; i < result.diagonal.size(); ++i) {
        const auto& tag = result.rows[static_cast<std::size_t>(i)];
        out << tag.element_id << ',' << to_string(tag.mode) << ',' << result.diagonal[i] << '\n';
    }
    out.precision(old);
}

void write_coordinate(std::ostream& out, const Eigen::MatrixXd& M, const std::vector<RowTag>& row_tags,
                      const std::vector<RowTag>& col_tags)
{
    const auto old = out.precision(17);
    long nnz = 0;
    for (Eigen::Index j = 0; j < M.cols(); ++j)
        for (Eigen::Index i = 0; i < M.rows(); ++i) nnz += M(i, j) != 0.0;

    out << "%%MatrixMarket matrix coordinate real general\n";
    out << "% redmat result format " << kResultFormatVersion << '\n';
    provenance(out, "row", row_tags);
    if (!col_tags.empty()) provenance(out, "col", col_tags);
    out << M.rows() << ' ' << M.cols() << ' ' << nnz << '\n';
    for (Eigen::Index j = 0; j < M.cols(); ++j)
        for (Eigen::Index i = 0; i < M.rows(); ++i)
            if (M(i, j) != 0.0) out << i + 1 << ' ' << j + 1 << ' ' << M(i, j) << '\n';
    out.precision(old);
}

void write_coordinate(std::ostream& out, const SparseMatrix& M, const std::vector<RowTag>& row_tags)
{
    const auto old = out.precision(17);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << "% redmat result format " << kResultFormatVersion << '\n';
    provenance(out, "row", row_tags);
    out << M.rows() << ' ' << M.cols() << ' ' << M.nonZeros() << '\n';
    for (int j = 0; j < M.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(M, j); it; ++it)
            out << it.row() + 1 << ' ' << j + 1 << ' ' << it.value() << '\n';
    out.precision(old);
}

void dump_system(const AssembledSystem& sys, const std::filesystem::path& prefix)
{
    {
        auto out = open_out(prefix.string() + "_A.mtx");
        write_coordinate(out, sys.A, sys.row_index);
    }
    auto out = open_out(prefix.string() + "_C.mtx");
    out << "%%MatrixMarket matrix array real general\n";
    provenance(out, "row", sys.row_index);
    out << sys.C_diag.size() << " 1\n";
    for (Eigen::Index i = 0; i < sys.C_diag.size(); ++i) out << sys.C_diag[i] << '\n';
}

} // namespace redmat
