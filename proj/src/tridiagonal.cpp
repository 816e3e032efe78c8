#include "ncbs/tridiagonal.hpp"

#include "ncbs/errors.hpp"

#include <lapacke.h>

#include <cmath>
#include <stdexcept>
#include <string>

namespace ncbs {

bool is_diagonally_dominant(const Tridiagonal& a) {
    const std::size_t n = a.size();
    bool strict = false;
    for (std::size_t i = 0; i < n; ++i) {
        const double off = (i > 0 ? std::abs(a.sub[i]) : 0.0) + (i + 1 < n ? std::abs(a.sup[i]) : 0.0);
        const double d = std::abs(a.diag[i]);
        if (d < off) return false;
        if (d > off) strict = true;
    }
    return strict;
}

namespace {

std::vector<double> thomas(const Tridiagonal& a, std::span<const double> rhs) {
    const std::size_t n = a.size();
    std::vector<double> c(n, 0.0);
    std::vector<double> x(rhs.begin(), rhs.end());

    if (a.diag[0] == 0.0) throw NumericalError("singular tridiagonal system (zero pivot at row 0)");
    c[0] = n > 1 ? a.sup[0] / a.diag[0] : 0.0;
    x[0] /= a.diag[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double pivot = a.diag[i] - a.sub[i] * c[i - 1];
        if (pivot == 0.0) throw NumericalError("singular tridiagonal system (zero pivot at row " + std::to_string(i) + ")");
        c[i] = i + 1 < n ? a.sup[i] / pivot : 0.0;
        x[i] = (x[i] - a.sub[i] * x[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i > 0; --i) x[i - 1] -= c[i - 1] * x[i];
    return x;
}

std::vector<double> pivoted(const Tridiagonal& a, std::span<const double> rhs) {
    const std::size_t n = a.size();
    std::vector<double> dl(a.sub.begin() + 1, a.sub.end());
    std::vector<double> d(a.diag);
    std::vector<double> du(a.sup.begin(), a.sup.end() - 1);
    std::vector<double> x(rhs.begin(), rhs.end());
    const lapack_int info = LAPACKE_dgtsv(LAPACK_COL_MAJOR, static_cast<lapack_int>(n), 1, dl.data(), d.data(),
                                          du.data(), x.data(), static_cast<lapack_int>(n));
    if (info > 0) throw NumericalError("singular tridiagonal system (zero pivot at row " + std::to_string(info - 1) + ")");
    if (info < 0) throw std::logic_error("dgtsv rejected argument " + std::to_string(-info));
    return x;
}

}  // namespace

std::vector<double> tridiagonal_solve(const Tridiagonal& a, std::span<const double> rhs) {
    const std::size_t n = a.size();
    if (n == 0 || rhs.size() != n || a.sub.size() != n || a.sup.size() != n)
        throw std::invalid_argument("tridiagonal_solve: size mismatch");
    auto x = is_diagonally_dominant(a) ? thomas(a, rhs) : pivoted(a, rhs);
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(x[i])) throw NumericalError("tridiagonal solve produced a non-finite value at row " + std::to_string(i));
    return x;
}

std::vector<double> multiply(const Tridiagonal& a, std::span<const double> x) {
    const std::size_t n = a.size();
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = a.diag[i] * x[i];
        if (i > 0) s += a.sub[i] * x[i - 1];
        if (i + 1 < n) s += a.sup[i] * x[i + 1];
        y[i] = s;
    }
    return y;
}

}  // namespace ncbs
