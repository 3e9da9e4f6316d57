#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fedpir/rational.hpp"

namespace fedpir {

// Closed-form communication rates and costs for the three schemes compared
// in the cost report: "ours" (graph-stored ramp shares with dual-weighted
// retrieval), "baseline" (every client stores every objective it is assigned,
// retrieval over the full incidence), and "star" (replicate everything to all
// n clients with an MDS storage code of dimension k). All values are exact
// rationals; costs are measured in multiples of s*c symbols (one full label
// stream), so they depend only on the listed parameters.
//
// Domain errors (nonpositive denominators, out-of-range k) raise ConfigError.

Rational sharing_rate_ours(int n, int T, int rho, int z_s, int z_q);
Rational pir_rate_ours(int n, int rho, int z_s, int z_q);
Rational total_cost_ours(int n, int T, int rho, int z_s, int z_q);

Rational sharing_rate_baseline(int T, int rho);
Rational pir_rate_baseline(int n, int rho, int z_s, int z_q);
Rational total_cost_baseline(int n, int T, int rho, int z_s, int z_q);

// Star scheme: valid for z_s < k <= n - z_q.
Rational sharing_rate_star(int n, int T, int k, int z_s);
Rational pir_rate_star(int n, int k, int z_s, int z_q);
Rational total_cost_star(int n, int T, int k, int z_s, int z_q);

// Storage-code dimension minimizing total_cost_star. Closed form: the real
// stationary point k' of the continuous cost, then the best integer among
// floor/ceil clamped to the feasible range [z_s+1, n-z_q]. Ties prefer the
// smaller k. Requires T*n*(n-1) > n and a nonempty feasible range.
struct OptimalKc {
    int k;
    Rational cost;
};
OptimalKc optimal_kc(int n, int T, int z_s, int z_q);

// One scheme's row in a rate/cost report.
struct RateRow {
    std::string scheme;
    bool has_k = false;
    Rational k;
    Rational sharing_rate;
    Rational pir_rate;
    Rational total_cost;
};

// Rows for ours and baseline at the given rho; a star row (at the cost-optimal
// k) is appended when rho == n. Errors propagate if a scheme is undefined at
// these parameters.
std::vector<RateRow> rate_table(int n, int T, int rho, int z_s, int z_q);

struct SweepPoint {
    std::string scheme;
    int n, T, rho, z_s, z_q;
    bool has_k = false;
    Rational k;
    Rational sharing_rate;
    Rational pir_rate;
    Rational total_cost;
};

struct Sweep {
    std::vector<SweepPoint> rows;
    // Human-readable notes for skipped infeasible points; emitted as comment
    // lines in the CSV.
    std::vector<std::string> skipped;
};

// Sweep rho over [rho_min, rho_max] at fixed (n, T, z_s, z_q). Each feasible
// rho yields an "ours" and a "baseline" row; at rho == n a "star" row with
// k = n - z_q is added (the replication point the reference curves use).
// Infeasible points are skipped with a note instead of failing the sweep.
Sweep sweep_costs(int n, int T, int z_s, int z_q, int rho_min, int rho_max);

// Pinned parameter sets for the report figures:
//   3, 4, 6: n=10,  T=10, z_s=z_q=1, rho in 3..10
//   5, 7:    n=100, T=20, z_s=z_q=5, rho in 11..100
Sweep sweep_figure(int figure);
std::string figure_filename(int figure);

// CSV with columns scheme,n,T,rho,z_s,z_q,k,sharing_rate,pir_rate,total_cost
// plus exact num/den renderings of the three values. Skipped points appear
// as '#' comment lines after the header.
void write_sweep_csv(const Sweep& sweep, std::ostream& out);

}  // namespace fedpir
