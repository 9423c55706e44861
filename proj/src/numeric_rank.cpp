#include "flatlab/numeric_rank.hpp"

#include "flatlab/error.hpp"

#include <cmath>

namespace flatlab {

RankInfo numeric_rank_info(const MatrixXcd& a, double rel_tol) {
    RankInfo info;
    if (a.size() == 0) return info;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag()))
                throw Error(ErrorKind::NonFiniteEntry,
                            "entry (" + std::to_string(i) + "," + std::to_string(j) + ") is not finite");
    Eigen::JacobiSVD<MatrixXcd> svd(a);
    const auto& s = svd.singularValues();
    info.singular_values.assign(s.data(), s.data() + s.size());
    if (s.size() == 0 || s(0) == 0.0) return info;
    const double cut = rel_tol * s(0);
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cut) ++info.rank;
    return info;
}

std::size_t numeric_rank(const MatrixXcd& a, double rel_tol) { return numeric_rank_info(a, rel_tol).rank; }

}  // namespace flatlab
