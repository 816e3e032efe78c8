#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ncbs {

/// Tridiagonal matrix in band storage. Row i holds sub[i] (column i-1),
/// diag[i] and sup[i] (column i+1); sub[0] and sup[n-1] are ignored.
struct Tridiagonal {
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> sup;

    Tridiagonal() = default;
    explicit Tridiagonal(std::size_t n) : sub(n, 0.0), diag(n, 0.0), sup(n, 0.0) {}

    std::size_t size() const noexcept { return diag.size(); }
};

/// |diag| >= |sub| + |sup| on every row, strictly on at least one.
bool is_diagonally_dominant(const Tridiagonal& a);

/// Solves A x = rhs. Diagonally dominant systems use the Thomas sweep;
/// anything else goes through LU with partial pivoting (LAPACK dgtsv).
/// Throws NumericalError when the system is singular.
std::vector<double> tridiagonal_solve(const Tridiagonal& a, std::span<const double> rhs);

std::vector<double> multiply(const Tridiagonal& a, std::span<const double> x);

}  // namespace ncbs
