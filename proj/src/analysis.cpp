#include "fedpir/analysis.hpp"

#include <algorithm>
#include <ostream>

#include "fedpir/errors.hpp"

namespace fedpir {

namespace {

void check_common(int n, int T, int z_s, int z_q) {
    if (n < 2) throw ConfigError("analysis: n must be at least 2");
    if (T < 1) throw ConfigError("analysis: T must be at least 1");
    if (z_s < 1 || z_q < 1)
        throw ConfigError("analysis: z_s and z_q must be at least 1");
}

void check_rho(int rho, int n) {
    if (rho < 2 || rho > n)
        throw ConfigError("analysis: rho must satisfy 2 <= rho <= n");
}

void check_star_k(int n, int k, int z_s, int z_q) {
    if (k <= z_s || k > n - z_q)
        throw ConfigError("star scheme: k must satisfy z_s < k <= n - z_q");
}

__int128 i128(long long v) { return (__int128)v; }

}  // namespace

Rational sharing_rate_ours(int n, int T, int rho, int z_s, int z_q) {
    check_common(n, T, z_s, z_q);
    check_rho(rho, n);
    long long num = (long long)rho - z_s - z_q + 1;
    if (num <= 0)
        throw ConfigError("sharing_rate_ours: requires rho >= z_s + z_q");
    return Rational(i128(num), i128(2) * T * rho * (rho - 1));
}

Rational pir_rate_ours(int n, int rho, int z_s, int z_q) {
    check_common(n, 1, z_s, z_q);
    check_rho(rho, n);
    long long num = (long long)rho - z_s - z_q + 1;
    if (num <= 0)
        throw ConfigError("pir_rate_ours: requires rho >= z_s + z_q");
    return Rational(i128(num), i128(2) * n);
}

Rational total_cost_ours(int n, int T, int rho, int z_s, int z_q) {
    check_common(n, T, z_s, z_q);
    check_rho(rho, n);
    long long den = (long long)rho - z_s - z_q + 1;
    if (den <= 0)
        throw ConfigError("total_cost_ours: division by zero (rho < z_s + z_q)");
    return Rational(i128(2) * T * rho * (rho - 1) + i128(2) * n, i128(den));
}

Rational sharing_rate_baseline(int T, int rho) {
    if (T < 1) throw ConfigError("analysis: T must be at least 1");
    if (rho < 2) throw ConfigError("analysis: rho must be at least 2");
    return Rational(1, i128(T) * rho * (rho - 1));
}

Rational pir_rate_baseline(int n, int rho, int z_s, int z_q) {
    check_common(n, 1, z_s, z_q);
    check_rho(rho, n);
    long long num = (long long)rho - z_s - z_q;
    if (num <= 0)
        throw ConfigError("pir_rate_baseline: requires rho > z_s + z_q");
    return Rational(i128(num), i128(n));
}

Rational total_cost_baseline(int n, int T, int rho, int z_s, int z_q) {
    check_common(n, T, z_s, z_q);
    check_rho(rho, n);
    long long den = (long long)rho - z_s - z_q;
    if (den <= 0)
        throw ConfigError(
            "total_cost_baseline: division by zero (rho <= z_s + z_q)");
    return Rational(i128(T) * rho * (rho - 1), 1) + Rational(i128(n), i128(den));
}

Rational sharing_rate_star(int n, int T, int k, int z_s) {
    check_common(n, T, z_s, 1);
    if (k <= z_s || k > n)
        throw ConfigError("star scheme: k must satisfy z_s < k <= n");
    return Rational(i128(k) - z_s, i128(T) * n * (n - 1));
}

Rational pir_rate_star(int n, int k, int z_s, int z_q) {
    check_common(n, 1, z_s, z_q);
    check_star_k(n, k, z_s, z_q);
    return Rational((i128(k) - z_s) * (i128(n) - k - z_q + 1), i128(n) * k);
}

Rational total_cost_star(int n, int T, int k, int z_s, int z_q) {
    check_common(n, T, z_s, z_q);
    check_star_k(n, k, z_s, z_q);
    Rational sharing(i128(T) * n * (n - 1), i128(k) - z_s);
    Rational retrieval(i128(k) * n,
                       (i128(k) - z_s) * (i128(n) - k - z_q + 1));
    return sharing + retrieval;
}

OptimalKc optimal_kc(int n, int T, int z_s, int z_q) {
    check_common(n, T, z_s, z_q);
    int k_min = z_s + 1;
    int k_max = n - z_q;
    if (k_min > k_max)
        throw ConfigError("optimal_kc: no feasible storage dimension");

    __int128 c1 = i128(n) - z_q + 1;
    __int128 c2 = i128(T) * n * (n - 1);
    __int128 B = c2 - i128(n);
    if (B <= 0)
        throw ConfigError("optimal_kc: requires T*n*(n-1) > n");

    // Stationary point of the continuous cost:
    //   k' = (c1*c2 - sqrt(c1^2 c2^2 - B*(c1^2 c2 + n*c1*z_s))) / B.
    // The cost is convex on the feasible range, so the integer optimum is
    // floor(k') or ceil(k'); with s = isqrt of the discriminant, both lie in
    // {floor((A-s-1)/B), floor((A-s)/B), floor((A-s)/B)+1}.
    __int128 A = Rational::checked_mul(c1, c2);
    __int128 D = Rational::checked_mul(A, A) -
                 Rational::checked_mul(
                     B, Rational::checked_mul(Rational::checked_mul(c1, c1), c2) +
                            Rational::checked_mul(i128(n) * z_s, c1));

    std::vector<long long> candidates;
    if (D >= 0) {
        __int128 s = isqrt128(D);
        __int128 lo = (A - s - 1) / B;
        __int128 hi = (A - s) / B + 1;
        for (__int128 c = lo; c <= hi; ++c) candidates.push_back((long long)c);
    } else {
        candidates = {k_min, k_max};
    }

    for (long long& c : candidates)
        c = std::clamp(c, (long long)k_min, (long long)k_max);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()),
                     candidates.end());

    OptimalKc best{0, Rational()};
    bool have = false;
    for (long long k : candidates) {
        Rational cost = total_cost_star(n, T, (int)k, z_s, z_q);
        if (!have || cost < best.cost) {
            best = {(int)k, cost};
            have = true;
        }
    }
    return best;
}

std::vector<RateRow> rate_table(int n, int T, int rho, int z_s, int z_q) {
    std::vector<RateRow> rows;

    RateRow ours;
    ours.scheme = "ours";
    ours.has_k = true;
    ours.k = Rational(i128(rho) + z_s - z_q + 1, 2);
    ours.sharing_rate = sharing_rate_ours(n, T, rho, z_s, z_q);
    ours.pir_rate = pir_rate_ours(n, rho, z_s, z_q);
    ours.total_cost = total_cost_ours(n, T, rho, z_s, z_q);
    rows.push_back(ours);

    RateRow base;
    base.scheme = "baseline";
    base.sharing_rate = sharing_rate_baseline(T, rho);
    base.pir_rate = pir_rate_baseline(n, rho, z_s, z_q);
    base.total_cost = total_cost_baseline(n, T, rho, z_s, z_q);
    rows.push_back(base);

    if (rho == n) {
        OptimalKc opt = optimal_kc(n, T, z_s, z_q);
        RateRow star;
        star.scheme = "star";
        star.has_k = true;
        star.k = Rational(opt.k);
        star.sharing_rate = sharing_rate_star(n, T, opt.k, z_s);
        star.pir_rate = pir_rate_star(n, opt.k, z_s, z_q);
        star.total_cost = opt.cost;
        rows.push_back(star);
    }
    return rows;
}

Sweep sweep_costs(int n, int T, int z_s, int z_q, int rho_min, int rho_max) {
    check_common(n, T, z_s, z_q);
    if (rho_min > rho_max)
        return Sweep{};  // empty range: header-only CSV
    Sweep sweep;
    for (int rho = rho_min; rho <= rho_max; ++rho) {
        if (rho < 2 || rho > n) {
            sweep.skipped.push_back("skipped rho=" + std::to_string(rho) +
                                    ": outside 2 <= rho <= n");
            continue;
        }
        SweepPoint pt;
        pt.n = n;
        pt.T = T;
        pt.rho = rho;
        pt.z_s = z_s;
        pt.z_q = z_q;

        if (rho - z_s - z_q + 1 > 0) {
            SweepPoint ours = pt;
            ours.scheme = "ours";
            ours.has_k = true;
            ours.k = Rational(i128(rho) + z_s - z_q + 1, 2);
            ours.sharing_rate = sharing_rate_ours(n, T, rho, z_s, z_q);
            ours.pir_rate = pir_rate_ours(n, rho, z_s, z_q);
            ours.total_cost = total_cost_ours(n, T, rho, z_s, z_q);
            sweep.rows.push_back(ours);
        } else {
            sweep.skipped.push_back("skipped scheme=ours rho=" +
                                    std::to_string(rho) +
                                    ": requires rho >= z_s + z_q");
        }

        if (rho - z_s - z_q > 0) {
            SweepPoint base = pt;
            base.scheme = "baseline";
            base.sharing_rate = sharing_rate_baseline(T, rho);
            base.pir_rate = pir_rate_baseline(n, rho, z_s, z_q);
            base.total_cost = total_cost_baseline(n, T, rho, z_s, z_q);
            sweep.rows.push_back(base);
        } else {
            sweep.skipped.push_back("skipped scheme=baseline rho=" +
                                    std::to_string(rho) +
                                    ": requires rho > z_s + z_q");
        }

        if (rho == n) {
            int k = n - z_q;
            if (k > z_s) {
                SweepPoint star = pt;
                star.scheme = "star";
                star.has_k = true;
                star.k = Rational(k);
                star.sharing_rate = sharing_rate_star(n, T, k, z_s);
                star.pir_rate = pir_rate_star(n, k, z_s, z_q);
                star.total_cost = total_cost_star(n, T, k, z_s, z_q);
                sweep.rows.push_back(star);
            } else {
                sweep.skipped.push_back(
                    "skipped scheme=star rho=" + std::to_string(rho) +
                    ": no k with z_s < k <= n - z_q");
            }
        }
    }
    return sweep;
}

Sweep sweep_figure(int figure) {
    switch (figure) {
        case 3:
        case 4:
        case 6:
            return sweep_costs(10, 10, 1, 1, 3, 10);
        case 5:
        case 7:
            return sweep_costs(100, 20, 5, 5, 11, 100);
        default:
            throw ConfigError("sweep_figure: figure must be 3..7");
    }
}

std::string figure_filename(int figure) {
    if (figure < 3 || figure > 7)
        throw ConfigError("figure_filename: figure must be 3..7");
    return "fig" + std::to_string(figure) + ".csv";
}

void write_sweep_csv(const Sweep& sweep, std::ostream& out) {
    out << "scheme,n,T,rho,z_s,z_q,k,sharing_rate,pir_rate,total_cost,"
           "sharing_rate_exact,pir_rate_exact,total_cost_exact\n";
    for (const std::string& note : sweep.skipped) out << "# " << note << "\n";
    for (const SweepPoint& pt : sweep.rows) {
        out << pt.scheme << ',' << pt.n << ',' << pt.T << ',' << pt.rho << ','
            << pt.z_s << ',' << pt.z_q << ',';
        if (pt.has_k) out << to_decimal(pt.k);
        out << ',' << to_decimal(pt.sharing_rate) << ','
            << to_decimal(pt.pir_rate) << ',' << to_decimal(pt.total_cost)
            << ',' << to_fraction(pt.sharing_rate) << ','
            << to_fraction(pt.pir_rate) << ',' << to_fraction(pt.total_cost)
            << '\n';
    }
}

}  // namespace fedpir
