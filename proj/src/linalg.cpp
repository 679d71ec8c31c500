// linalg.cpp — Pade-13 matrix exponential and grid helpers

#include "wgheat/linalg.hpp"

#include <array>
#include <cmath>

#include "wgheat/errors.hpp"

namespace wgheat::linalg {

double norm1(const Eigen::MatrixXcd& a) {
    return a.cwiseAbs().colwise().sum().maxCoeff();
}

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a) {
    if (a.rows() != a.cols()) throw DomainError("expm requires a square matrix");
    const auto n = a.rows();
    if (n == 0) return a;
    if (!a.allFinite()) throw NumericalError("expm: non-finite input");

    static constexpr std::array<double, 14> b = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0,  129060195264000.0,   10559470521600.0,
        670442572800.0,      33522128640.0,       1323241920.0,
        40840800.0,          960960.0,            16380.0,
        182.0,               1.0};
    constexpr double theta13 = 5.371920351148152;

    const double nrm = norm1(a);
    int s = 0;
    if (nrm > theta13) s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    const Eigen::MatrixXcd x = a / std::ldexp(1.0, s);

    const Eigen::MatrixXcd ident = Eigen::MatrixXcd::Identity(n, n);
    const Eigen::MatrixXcd x2 = x * x;
    const Eigen::MatrixXcd x4 = x2 * x2;
    const Eigen::MatrixXcd x6 = x4 * x2;

    const Eigen::MatrixXcd u_inner = x6 * (b[13] * x6 + b[11] * x4 + b[9] * x2)
                                     + b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * ident;
    const Eigen::MatrixXcd u = x * u_inner;
    const Eigen::MatrixXcd v = x6 * (b[12] * x6 + b[10] * x4 + b[8] * x2)
                               + b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * ident;

    Eigen::MatrixXcd r = (v - u).partialPivLu().solve(v + u);
    for (int k = 0; k < s; ++k) r = r * r;
    return r;
}

std::vector<double> linspace(double first, double last, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = first;
        return out;
    }
    const double step = (last - first) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = first + step * static_cast<double>(i);
    if (n > 1) out.back() = last;
    return out;
}

std::vector<double> logspace(double first, double last, std::size_t n) {
    if (!(first > 0.0) || !(last > 0.0)) throw DomainError("logspace bounds must be positive");
    auto exps = linspace(std::log(first), std::log(last), n);
    for (auto& e : exps) e = std::exp(e);
    if (n > 0) {
        exps.front() = first;
        exps.back() = last;
    }
    return exps;
}

bool strictly_increasing(std::span<const double> grid) {
    if (grid.empty()) return false;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) return false;
    return true;
}

} // namespace wgheat::linalg
