#include "hgf/index.hpp"

#include <Eigen/Dense>

namespace hgf {

namespace {

template <int N>
Eigen::Matrix<double, N, N> load(std::span<const double> a) {
    Eigen::Matrix<double, N, N> m;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) m(i, j) = a[i * N + j];
    return m;
}

template <int N>
Eigen::Matrix<double, N, 1> eigenvalues(std::span<const double> a) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>> es;
    es.computeDirect(load<N>(a), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

}  // namespace

double min_eigenvalue(std::span<const double> a, int n) noexcept {
    return n == 2 ? eigenvalues<2>(a).minCoeff() : eigenvalues<3>(a).minCoeff();
}

double max_eigenvalue(std::span<const double> a, int n) noexcept {
    return n == 2 ? eigenvalues<2>(a).maxCoeff() : eigenvalues<3>(a).maxCoeff();
}

void invert_symmetric(std::span<const double> a, int n, std::span<double> out) noexcept {
    auto store = [&](const auto& inv) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out[i * n + j] = 0.5 * (inv(i, j) + inv(j, i));
    };
    if (n == 2)
        store(load<2>(a).inverse().eval());
    else
        store(load<3>(a).inverse().eval());
}

}  // namespace hgf
