#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fedpir/analysis.hpp"
#include "fedpir/errors.hpp"
#include "fedpir/rational.hpp"

using namespace fedpir;

namespace {

// Oracle for optimal_kc: try every feasible k.
OptimalKc scan_optimal(int n, int T, int z_s, int z_q) {
    OptimalKc best{0, Rational()};
    bool have = false;
    for (int k = z_s + 1; k <= n - z_q; ++k) {
        Rational c = total_cost_star(n, T, k, z_s, z_q);
        if (!have || c < best.cost) {
            best = {k, c};
            have = true;
        }
    }
    REQUIRE(have);
    return best;
}

double rel_err(const Rational& got, double want) {
    return std::fabs((double)to_long_double(got) - want) / std::fabs(want);
}

const SweepPoint* find_row(const Sweep& s, const std::string& scheme, int rho) {
    for (const SweepPoint& pt : s.rows)
        if (pt.scheme == scheme && pt.rho == rho) return &pt;
    return nullptr;
}

}  // namespace

TEST_CASE("rational normalization and arithmetic") {
    Rational r(2, -4);
    CHECK(r.num == -1);
    CHECK(r.den == 2);
    CHECK(to_fraction(r) == "-1/2");
    CHECK(to_fraction(Rational(6, 3)) == "2");

    CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
    CHECK(Rational(1, 2) - Rational(1, 3) == Rational(1, 6));
    CHECK(Rational(2, 3) * Rational(9, 4) == Rational(3, 2));
    CHECK(Rational(2, 3) / Rational(4, 3) == Rational(1, 2));
    CHECK(-Rational(1, 2) == Rational(-1, 2));
    CHECK(Rational(7, 3) > Rational(9, 4));
    CHECK(Rational(-5, 2) < Rational(-7, 3));
    CHECK(Rational(3).is_integer());
    CHECK_FALSE(Rational(3, 2).is_integer());

    CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
    CHECK_THROWS_AS(Rational(1, 2) / Rational(0), std::invalid_argument);

    __int128 big = (__int128)1 << 100;
    Rational huge(big, 1);
    CHECK_THROWS_AS(huge * huge, std::overflow_error);
}

TEST_CASE("rational rendering") {
    CHECK(to_decimal(Rational(70)) == "70");
    CHECK(to_decimal(Rational(1, 10)) == "0.1");
    CHECK(int128_to_string((__int128)0) == "0");
    CHECK(int128_to_string((__int128)-1234567890123LL) == "-1234567890123");
    // 12 significant digits survive a round trip well inside 1e-9 relative
    // error.
    Rational r(12440, 9);
    double parsed = std::stod(to_decimal(r));
    CHECK(rel_err(r, parsed) < 1e-10);
}

TEST_CASE("isqrt128 is exact floor sqrt") {
    CHECK(isqrt128(0) == 0);
    CHECK(isqrt128(1) == 1);
    CHECK(isqrt128(2) == 1);
    CHECK(isqrt128(3) == 1);
    CHECK(isqrt128(4) == 2);
    CHECK(isqrt128(811000) == 900);
    __int128 b = ((__int128)1 << 60) + 12345;
    CHECK(isqrt128(b * b) == b);
    CHECK(isqrt128(b * b - 1) == b - 1);
    CHECK(isqrt128(b * b + 1) == b);
    CHECK_THROWS_AS(isqrt128(-1), std::invalid_argument);
}

TEST_CASE("cost curves at n=10, T=10, z_s=z_q=1") {
    const Rational ours_expected[] = {
        Rational(70),       Rational(260, 3), Rational(105),
        Rational(124),      Rational(430, 3), Rational(1140, 7),
        Rational(365, 2),   Rational(1820, 9)};
    const Rational base_expected[] = {
        Rational(70),       Rational(125),     Rational(610, 3),
        Rational(605, 2),   Rational(422),     Rational(1685, 3),
        Rational(5050, 7),  Rational(3605, 4)};
    for (int rho = 3; rho <= 10; ++rho) {
        CHECK(total_cost_ours(10, 10, rho, 1, 1) == ours_expected[rho - 3]);
        CHECK(total_cost_baseline(10, 10, rho, 1, 1) == base_expected[rho - 3]);
    }
    CHECK(total_cost_star(10, 10, 9, 1, 1) == Rational(495, 4));
    CHECK(rel_err(total_cost_star(10, 10, 9, 1, 1), 123.75) < 1e-9);
}

TEST_CASE("cost curves at n=100, T=20, z_s=z_q=5") {
    CHECK(total_cost_ours(100, 20, 11, 5, 5) == Rational(2300));
    CHECK(total_cost_ours(100, 20, 18, 5, 5) == Rational(12440, 9));
    CHECK(total_cost_ours(100, 20, 100, 5, 5) == Rational(396200, 91));
    CHECK(rel_err(total_cost_ours(100, 20, 18, 5, 5), 1382.22222222222) < 1e-9);
    CHECK(rel_err(total_cost_ours(100, 20, 100, 5, 5), 4353.84615384615) < 1e-9);

    // rho = 18 is the curve minimum over the sweep range.
    Rational at18 = total_cost_ours(100, 20, 18, 5, 5);
    for (int rho = 11; rho <= 100; ++rho)
        CHECK(at18 <= total_cost_ours(100, 20, rho, 5, 5));

    CHECK(total_cost_baseline(100, 20, 100, 5, 5) == Rational(1782010, 9));
    CHECK(rel_err(total_cost_baseline(100, 20, 100, 5, 5), 198001.111111111) <
          1e-9);

    CHECK(total_cost_star(100, 20, 95, 5, 5) == Rational(20750, 9));
    CHECK(rel_err(total_cost_star(100, 20, 95, 5, 5), 2305.55555555556) < 1e-9);
}

TEST_CASE("rate values at the figure parameter sets") {
    CHECK(sharing_rate_ours(10, 10, 3, 1, 1) == Rational(1, 60));
    CHECK(sharing_rate_star(10, 10, 9, 1) == Rational(8, 900));
    CHECK(sharing_rate_baseline(10, 3) == Rational(1, 60));

    CHECK(pir_rate_ours(10, 10, 1, 1) == Rational(9, 20));
    CHECK(pir_rate_baseline(10, 10, 1, 1) == Rational(8, 10));
    CHECK(pir_rate_star(10, 9, 1, 1) == Rational(8, 90));
}

TEST_CASE("rates stay in (0, 1]") {
    std::mt19937_64 rng(41);
    int tried = 0;
    while (tried < 200) {
        int n = 2 + (int)(rng() % 60);
        int T = 1 + (int)(rng() % 8);
        int z_s = 1 + (int)(rng() % 4);
        int z_q = 1 + (int)(rng() % 4);
        int rho = 2 + (int)(rng() % (uint64_t)(n - 1));
        ++tried;
        auto in_unit = [](const Rational& r) {
            return !r.is_negative() && !r.is_zero() && r <= Rational(1);
        };
        if (rho - z_s - z_q + 1 > 0) {
            CHECK(in_unit(sharing_rate_ours(n, T, rho, z_s, z_q)));
            CHECK(in_unit(pir_rate_ours(n, rho, z_s, z_q)));
        }
        CHECK(in_unit(sharing_rate_baseline(T, rho)));
        if (rho - z_s - z_q > 0)
            CHECK(in_unit(pir_rate_baseline(n, rho, z_s, z_q)));
        if (z_s + 1 <= n - z_q) {
            int k = z_s + 1 + (int)(rng() % (uint64_t)(n - z_q - z_s));
            CHECK(in_unit(sharing_rate_star(n, T, k, z_s)));
            CHECK(in_unit(pir_rate_star(n, k, z_s, z_q)));
        }
    }
}

TEST_CASE("division-by-zero and out-of-range parameters are rejected") {
    CHECK_THROWS_AS(total_cost_baseline(10, 10, 2, 1, 1), ConfigError);
    CHECK_THROWS_AS(pir_rate_baseline(10, 2, 1, 1), ConfigError);
    CHECK_THROWS_AS(total_cost_ours(10, 10, 2, 2, 2), ConfigError);
    CHECK_THROWS_AS(sharing_rate_ours(10, 10, 2, 2, 2), ConfigError);
    CHECK_THROWS_AS(total_cost_star(10, 10, 1, 1, 1), ConfigError);
    CHECK_THROWS_AS(total_cost_star(10, 10, 10, 1, 1), ConfigError);
    CHECK_THROWS_AS(pir_rate_star(10, 10, 1, 1), ConfigError);
    CHECK_THROWS_AS(total_cost_ours(10, 10, 11, 1, 1), ConfigError);
    CHECK_THROWS_AS(total_cost_ours(1, 10, 1, 1, 1), ConfigError);
}

TEST_CASE("optimal_kc matches exhaustive scan") {
    OptimalKc fig3 = optimal_kc(10, 10, 1, 1);
    CHECK(fig3.k == 9);
    CHECK(fig3.cost == Rational(495, 4));

    // At n=100, T=20, z=5 the interior optimum beats the k = n - z_q
    // replication point used by the reference curves.
    OptimalKc big = optimal_kc(100, 20, 5, 5);
    CHECK(big.k == 94);
    CHECK(big.cost == Rational(202700, 89));
    CHECK(big.cost < total_cost_star(100, 20, 95, 5, 5));

    std::mt19937_64 rng(42);
    int tried = 0;
    while (tried < 60) {
        int n = 3 + (int)(rng() % 198);
        int T = 1 + (int)(rng() % 40);
        int z_s = 1 + (int)(rng() % 6);
        int z_q = 1 + (int)(rng() % 6);
        if (z_s + 1 > n - z_q) continue;
        if ((__int128)T * n * (n - 1) <= n) continue;
        ++tried;
        OptimalKc got = optimal_kc(n, T, z_s, z_q);
        OptimalKc want = scan_optimal(n, T, z_s, z_q);
        CHECK(got.k == want.k);
        CHECK(got.cost == want.cost);
        for (int k = z_s + 1; k <= n - z_q; ++k)
            CHECK(got.cost <= total_cost_star(n, T, k, z_s, z_q));
    }

    CHECK_THROWS_AS(optimal_kc(4, 2, 2, 2), ConfigError);
}

TEST_CASE("rate_table rows") {
    auto rows = rate_table(10, 10, 10, 1, 1);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].scheme == "ours");
    CHECK(rows[0].k == Rational(11, 2));
    CHECK(rows[0].total_cost == Rational(1820, 9));
    CHECK(rows[1].scheme == "baseline");
    CHECK_FALSE(rows[1].has_k);
    CHECK(rows[2].scheme == "star");
    CHECK(rows[2].k == Rational(9));
    CHECK(rows[2].total_cost == Rational(495, 4));

    // The optimizer's table row reports the true optimum even where the
    // sweep's star point sits at k = n - z_q.
    auto big = rate_table(100, 20, 100, 5, 5);
    REQUIRE(big.size() == 3);
    CHECK(big[2].k == Rational(94));
    CHECK(big[2].total_cost == Rational(202700, 89));

    auto mid = rate_table(10, 10, 5, 1, 1);
    CHECK(mid.size() == 2);
}

TEST_CASE("figure sweeps have the pinned shape and values") {
    Sweep f3 = sweep_figure(3);
    CHECK(f3.skipped.empty());
    int ours_rows = 0, base_rows = 0, star_rows = 0;
    for (const SweepPoint& pt : f3.rows) {
        if (pt.scheme == "ours") ++ours_rows;
        if (pt.scheme == "baseline") ++base_rows;
        if (pt.scheme == "star") ++star_rows;
    }
    CHECK(ours_rows == 8);
    CHECK(base_rows == 8);
    CHECK(star_rows == 1);

    const SweepPoint* star = find_row(f3, "star", 10);
    REQUIRE(star);
    CHECK(star->k == Rational(9));
    CHECK(star->total_cost == Rational(495, 4));
    CHECK(star->sharing_rate == Rational(8, 900));
    CHECK(star->pir_rate == Rational(8, 90));

    const SweepPoint* ours3 = find_row(f3, "ours", 3);
    REQUIRE(ours3);
    CHECK(ours3->k == Rational(2));
    CHECK(ours3->sharing_rate == Rational(1, 60));
    CHECK(ours3->total_cost == Rational(70));

    Sweep f5 = sweep_figure(5);
    CHECK(f5.rows.size() == 90 + 90 + 1);
    const SweepPoint* star5 = find_row(f5, "star", 100);
    REQUIRE(star5);
    CHECK(star5->k == Rational(95));
    CHECK(star5->total_cost == Rational(20750, 9));
    const SweepPoint* ours18 = find_row(f5, "ours", 18);
    REQUIRE(ours18);
    CHECK(ours18->total_cost == Rational(12440, 9));

    // Figures sharing a parameter set produce identical tables.
    std::ostringstream a, b;
    write_sweep_csv(sweep_figure(4), a);
    write_sweep_csv(sweep_figure(6), b);
    CHECK(a.str() == b.str());
    std::ostringstream c, d;
    write_sweep_csv(sweep_figure(5), c);
    write_sweep_csv(sweep_figure(7), d);
    CHECK(c.str() == d.str());

    CHECK_THROWS_AS(sweep_figure(2), ConfigError);
    CHECK(figure_filename(3) == "fig3.csv");
    CHECK(figure_filename(7) == "fig7.csv");
    CHECK_THROWS_AS(figure_filename(8), ConfigError);
}

TEST_CASE("sweep skips infeasible points with notes") {
    Sweep s = sweep_costs(6, 2, 2, 2, 4, 6);
    // rho=4: ours defined (width 1), baseline pole; rho=5,6: both defined.
    CHECK(s.rows.size() == 2 + 2 + 1 + 1);  // ours x3, baseline x2, star
    REQUIRE(s.skipped.size() == 1);
    CHECK(s.skipped[0].find("baseline") != std::string::npos);
    CHECK(s.skipped[0].find("rho=4") != std::string::npos);
    CHECK(find_row(s, "baseline", 4) == nullptr);
    REQUIRE(find_row(s, "star", 6));
    CHECK(find_row(s, "star", 6)->k == Rational(4));

    Sweep empty = sweep_costs(10, 10, 1, 1, 5, 4);
    CHECK(empty.rows.empty());
    CHECK(empty.skipped.empty());

    Sweep clipped = sweep_costs(5, 2, 1, 1, 4, 7);
    for (const SweepPoint& pt : clipped.rows) CHECK(pt.rho <= 5);
    CHECK(clipped.skipped.size() == 2);  // rho=6,7 outside range
}

TEST_CASE("sweep CSV format") {
    Sweep s = sweep_costs(10, 10, 1, 1, 3, 3);
    std::ostringstream out;
    write_sweep_csv(s, out);
    std::istringstream lines(out.str());
    std::string header, row1;
    std::getline(lines, header);
    CHECK(header ==
          "scheme,n,T,rho,z_s,z_q,k,sharing_rate,pir_rate,total_cost,"
          "sharing_rate_exact,pir_rate_exact,total_cost_exact");
    std::getline(lines, row1);
    CHECK(row1.substr(0, 18) == "ours,10,10,3,1,1,2");
    CHECK(row1.find(",1/60,1/10,70") != std::string::npos);

    // Empty sweep: header only.
    std::ostringstream empty;
    write_sweep_csv(sweep_costs(10, 10, 1, 1, 5, 4), empty);
    CHECK(empty.str() ==
          "scheme,n,T,rho,z_s,z_q,k,sharing_rate,pir_rate,total_cost,"
          "sharing_rate_exact,pir_rate_exact,total_cost_exact\n");

    // Skipped points render as comment lines after the header.
    std::ostringstream skipped;
    write_sweep_csv(sweep_costs(6, 2, 2, 2, 4, 4), skipped);
    std::istringstream sl(skipped.str());
    std::string h, note;
    std::getline(sl, h);
    std::getline(sl, note);
    CHECK(note.substr(0, 2) == "# ");
}
