#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace flatlab {

using MatrixXcd = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kDefaultRankTol = 1e-9;

struct RankInfo {
    std::size_t rank = 0;
    std::vector<double> singular_values;
};

// Singular values above rel_tol * sigma_max count toward the rank.
RankInfo numeric_rank_info(const MatrixXcd& a, double rel_tol = kDefaultRankTol);
std::size_t numeric_rank(const MatrixXcd& a, double rel_tol = kDefaultRankTol);

}  // namespace flatlab
