#pragma once

#include "fedpir/assignment.hpp"
#include "fedpir/field.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace fedpir {

// Polynomial with vector coefficients over a prime field: coeffs[d] is the
// length-`width` coefficient of x^d. A scalar polynomial is width == 1.
struct VecPolynomial {
    const PrimeField* field = nullptr;
    std::size_t width = 0;
    std::vector<std::vector<uint64_t>> coeffs;

    std::size_t degree_bound() const { return coeffs.size(); } // number of coefficients
};

VecPolynomial make_polynomial(const PrimeField& f, std::size_t width, std::size_t num_coeffs);

// Horner evaluation; returns a length-`width` vector.
std::vector<uint64_t> evaluate(const VecPolynomial& p, uint64_t x);

// Unique polynomial of degree < points.size() through the given (x, y) pairs.
// The x must be pairwise distinct, the y all of equal width.
VecPolynomial interpolate(const PrimeField& f,
                          const std::vector<std::pair<uint64_t, std::vector<uint64_t>>>& points);

// Dual (generalized Reed-Solomon) coefficients for a set of evaluation
// points indexed by `clients`: nu[m] = prod_{m' != m} (x_m - x_{m'})^{-1},
// where x_m = pts[clients[m]]. Needs at least two clients and distinct points.
std::vector<uint64_t> dual_coefficients(const std::vector<int>& clients,
                                        const std::vector<uint64_t>& pts,
                                        const PrimeField& f);

// Convenience overload for the storage set of objective t.
std::vector<uint64_t> dual_coefficients(int t, const TaskAssignment& a,
                                        const std::vector<uint64_t>& pts,
                                        const PrimeField& f);

// Checks sum_m nu[m] * x_m^zeta == 0 for all zeta in [0, clients.size()-2].
bool dual_annihilation_check(const std::vector<int>& clients,
                             const std::vector<uint64_t>& duals,
                             const std::vector<uint64_t>& pts,
                             const PrimeField& f);

} // namespace fedpir
