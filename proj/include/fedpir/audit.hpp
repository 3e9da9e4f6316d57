#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "fedpir/assignment.hpp"
#include "fedpir/protocol.hpp"
#include "fedpir/rational.hpp"

namespace fedpir {

// Hard cap on the enumerated joint states of one audit call, checked before
// any work is done.
inline constexpr uint64_t kAuditStateGuard = 100000000ULL;

// A protocol configuration small enough for exhaustive enumeration:
// q <= 13, c == 1, s <= 2, T <= 2, n <= 4. The assignment is the cyclic one.
struct MicroConfig {
    ProtocolConfig cfg;
    TaskAssignment a;
};

// Validates the enumeration bounds; ConfigError outside them.
MicroConfig make_micro_config(const ProtocolConfig& cfg);

struct AuditOptions {
    // Slice pins: fix one randomness class to all-zero instead of enumerating
    // it. Used where the full product space exceeds the state guard; the pin
    // is noted in the result detail.
    bool pin_labels_zero = false;
    bool pin_share_coins_zero = false;

    // Seeded defects for negative controls.
    bool oversize_collusion = false; // permit one colluder beyond the tolerance
    bool zero_query_coins = false;   // unblinded selector queries
    bool plain_answers = false;      // skip the shared response mask
    bool corrupt_duals = false;      // decoding weights from the wrong client set

    // Re-run every k-th enumerated state through the regular protocol stack
    // and require identical messages, storage, queries and answers (0 = off).
    uint64_t cross_check_every = 0;
};

// Joint distribution of (secret, view, conditioning) as exact counts over the
// enumerated states. Backed by dense arrays when the index spaces are small,
// otherwise by hash maps of the occupied cells.
class ViewDistribution {
  public:
    ViewDistribution(uint64_t nx, uint64_t nv, uint64_t nz);
    ~ViewDistribution();
    ViewDistribution(ViewDistribution&&) noexcept;
    ViewDistribution& operator=(ViewDistribution&&) noexcept;

    void add(uint64_t x, uint64_t v, uint64_t z);
    uint64_t total() const;
    uint64_t occupied_cells() const;

    // Exact independence of X and V given Z: every cell satisfies
    // n(x,v,z) * n(z) == n(x,z) * n(v,z), including the absent ones (covered
    // through per-z support counts). Zero mutual information is certified by
    // this integer identity alone; no floating point is involved.
    bool exactly_independent() const;

    // I(X; V | Z) in bits from the exact counts. The value is an exact
    // rational whenever every per-cell probability ratio is a power of two
    // (in particular 0, and log2(T) for the determined-view controls);
    // `representable` reports whether that held. `estimate` is always valid.
    struct MI {
        bool representable = false;
        Rational bits;
        long double estimate = 0;
    };
    MI mutual_information() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Outcome of one exhaustive audit call.
struct MIAudit {
    bool exact_zero = false;
    bool representable = false; // MI expressible exactly in bits
    Rational bits;              // exact when representable
    long double bits_estimate = 0;
    uint64_t states = 0;
    uint64_t cells = 0;
    uint64_t cross_checks = 0;
    std::string detail;
};

// Data privacy from clients: I(target's labels ; messages received by the
// colluders | colluders' own labels) over every combination of label values
// and share randomness. Requires |colluders| <= z_s unless
// opt.oversize_collusion permits one extra (the leak demonstration).
MIAudit audit_data_privacy(const MicroConfig& mc, const std::vector<int>& colluders,
                           int target_client, const AuditOptions& opt = {});

// Objective hiding: I(colluders' queries + stored shares + received messages ;
// J) with J uniform over [T], over every combination of label values, share
// randomness, query randomness and J. Requires |colluders| <= z_q.
MIAudit audit_objective_hiding(const MicroConfig& mc, const std::vector<int>& colluders,
                               const AuditOptions& opt = {});

// Privacy from the federator (symmetric mode): I(all answers + all delivered
// queries ; all labels | aggregate of the queried objective) at the fixed
// j of the configuration, over labels, share randomness, query randomness and
// mask randomness.
MIAudit audit_federator_privacy(const MicroConfig& mc, const AuditOptions& opt = {});

// Exhaustive correctness: the protocol output equals the independently
// computed label sums of objective cfg.j for every enumerated randomness
// assignment, running the regular protocol stack for each state.
struct CorrectnessAudit {
    bool pass = false;
    uint64_t states = 0;
    uint64_t mismatches = 0;
    std::string detail;
};
CorrectnessAudit correctness_oracle(const MicroConfig& mc, const AuditOptions& opt = {});

// The full audit suite: every definition on several micro configurations,
// every colluder set and target, plus (optionally) the negative controls that
// must each detect their seeded defect.
struct SuiteEntry {
    std::string name;
    std::string definition; // "data", "objective", "federator", "correctness"
    bool is_control = false;
    bool pass = false;
    uint64_t states = 0;
    std::string mi_text; // exact MI or estimate, "" for correctness entries
    std::string detail;
};

struct SuiteResult {
    std::vector<SuiteEntry> entries;
    bool all_pass = false;
};

SuiteResult run_audit_suite(bool include_controls);
void write_suite_report(const SuiteResult& suite, std::ostream& out);

}  // namespace fedpir
