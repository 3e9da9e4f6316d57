#include "fedpir/poly.hpp"

#include <stdexcept>

namespace fedpir {

VecPolynomial make_polynomial(const PrimeField& f, std::size_t width, std::size_t num_coeffs) {
    VecPolynomial p;
    p.field = &f;
    p.width = width;
    p.coeffs.assign(num_coeffs, std::vector<uint64_t>(width, 0));
    return p;
}

std::vector<uint64_t> evaluate(const VecPolynomial& p, uint64_t x) {
    if (p.field == nullptr) throw std::invalid_argument("polynomial has no field");
    const PrimeField& f = *p.field;
    std::vector<uint64_t> acc(p.width, 0);
    for (std::size_t d = p.coeffs.size(); d-- > 0;) {
        for (std::size_t m = 0; m < p.width; ++m) {
            acc[m] = f.add(f.mul(acc[m], x), p.coeffs[d][m]);
        }
    }
    return acc;
}

VecPolynomial interpolate(const PrimeField& f,
                          const std::vector<std::pair<uint64_t, std::vector<uint64_t>>>& points) {
    const std::size_t k = points.size();
    if (k == 0) throw std::invalid_argument("interpolation needs at least one point");
    const std::size_t width = points[0].second.size();
    for (const auto& pt : points) {
        if (pt.second.size() != width) throw std::invalid_argument("interpolation values have mixed widths");
    }
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            if (points[a].first % f.q() == points[b].first % f.q())
                throw std::invalid_argument("interpolation nodes must be distinct");
        }
    }

    // Lagrange: accumulate y_j * prod_{m != j} (x - x_m) / (x_j - x_m).
    VecPolynomial result = make_polynomial(f, width, k);
    std::vector<uint64_t> basis(k, 0), next(k, 0);
    for (std::size_t j = 0; j < k; ++j) {
        basis.assign(k, 0);
        basis[0] = 1;
        std::size_t deg = 0;
        uint64_t denom = 1;
        for (std::size_t m = 0; m < k; ++m) {
            if (m == j) continue;
            const uint64_t xm = points[m].first % f.q();
            next.assign(k, 0);
            for (std::size_t d = 0; d <= deg; ++d) {
                next[d + 1] = f.add(next[d + 1], basis[d]);
                next[d] = f.add(next[d], f.mul(basis[d], f.neg(xm)));
            }
            basis.swap(next);
            ++deg;
            denom = f.mul(denom, f.sub(points[j].first, xm));
        }
        const uint64_t scale = f.inv(denom);
        for (std::size_t d = 0; d < k; ++d) {
            const uint64_t coef = f.mul(basis[d], scale);
            if (coef == 0) continue;
            for (std::size_t m = 0; m < width; ++m) {
                result.coeffs[d][m] =
                    f.add(result.coeffs[d][m], f.mul(coef, points[j].second[m] % f.q()));
            }
        }
    }
    return result;
}

std::vector<uint64_t> dual_coefficients(const std::vector<int>& clients,
                                        const std::vector<uint64_t>& pts,
                                        const PrimeField& f) {
    const std::size_t rho = clients.size();
    if (rho < 2) throw std::invalid_argument("dual coefficients need at least two clients");
    std::vector<uint64_t> nu(rho);
    for (std::size_t m = 0; m < rho; ++m) {
        const uint64_t xm = pts.at(static_cast<std::size_t>(clients[m]));
        uint64_t prod = 1;
        for (std::size_t m2 = 0; m2 < rho; ++m2) {
            if (m2 == m) continue;
            const uint64_t diff = f.sub(xm, pts.at(static_cast<std::size_t>(clients[m2])));
            if (diff == 0) throw std::invalid_argument("evaluation points must be distinct");
            prod = f.mul(prod, diff);
        }
        nu[m] = f.inv(prod);
    }
    return nu;
}

std::vector<uint64_t> dual_coefficients(int t, const TaskAssignment& a,
                                        const std::vector<uint64_t>& pts,
                                        const PrimeField& f) {
    return dual_coefficients(a.incident_clients(t), pts, f);
}

bool dual_annihilation_check(const std::vector<int>& clients,
                             const std::vector<uint64_t>& duals,
                             const std::vector<uint64_t>& pts,
                             const PrimeField& f) {
    if (clients.size() != duals.size()) throw std::invalid_argument("dual/client size mismatch");
    if (clients.size() < 2) return true;
    for (std::size_t zeta = 0; zeta + 2 <= clients.size(); ++zeta) {
        uint64_t sum = 0;
        for (std::size_t m = 0; m < clients.size(); ++m) {
            const uint64_t xm = pts.at(static_cast<std::size_t>(clients[m]));
            sum = f.add(sum, f.mul(duals[m], f.pow(xm, zeta)));
        }
        if (sum != 0) return false;
    }
    return true;
}

} // namespace fedpir
