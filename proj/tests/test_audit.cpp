#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fedpir/audit.hpp"
#include "fedpir/errors.hpp"
#include "fedpir/protocol.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

using namespace fedpir;

namespace {

MicroConfig micro(int n, int T, int rho, int z_s, int z_q, int s, int j1 = 1,
                  bool symmetric = false, std::optional<uint64_t> q = {}) {
    return make_micro_config(derive_params(n, T, rho, z_s, z_q, s, 1, 2, q, 7, j1, symmetric));
}

// Independent conditional-independence check on a hand-built joint table.
bool indep_oracle(const std::map<std::tuple<uint64_t, uint64_t, uint64_t>, uint64_t>& counts) {
    std::map<std::pair<uint64_t, uint64_t>, uint64_t> xz, vz;
    std::map<uint64_t, uint64_t> zc;
    for (const auto& [key, c] : counts) {
        auto [x, v, z] = key;
        xz[{x, z}] += c;
        vz[{v, z}] += c;
        zc[z] += c;
    }
    for (const auto& [key, c] : counts) {
        auto [x, v, z] = key;
        if ((__uint128_t)c * zc[z] != (__uint128_t)xz[{x, z}] * vz[{v, z}]) return false;
    }
    std::map<uint64_t, uint64_t> ox, ov, oxv;
    for (const auto& [key, c] : xz)
        if (c) ++ox[key.second];
    for (const auto& [key, c] : vz)
        if (c) ++ov[key.second];
    for (const auto& [key, c] : counts)
        if (c) ++oxv[std::get<2>(key)];
    for (const auto& [z, c] : oxv)
        if (c != ox[z] * ov[z]) return false;
    return true;
}

} // namespace

TEST_CASE("micro config bounds are enforced") {
    CHECK_NOTHROW(micro(3, 1, 3, 1, 1, 1));
    CHECK_NOTHROW(micro(4, 2, 3, 1, 1, 2));
    CHECK_THROWS_AS(make_micro_config(derive_params(5, 1, 5, 1, 1, 1, 1, 2)), ConfigError);
    CHECK_THROWS_AS(make_micro_config(derive_params(4, 3, 3, 1, 1, 1, 1, 2)), ConfigError);
    CHECK_THROWS_AS(make_micro_config(derive_params(3, 1, 3, 1, 1, 3, 1, 2)), ConfigError);
    CHECK_THROWS_AS(make_micro_config(derive_params(3, 1, 3, 1, 1, 1, 2, 2)), ConfigError);
    // gamma 6 on three clients forces q = 17, past the enumeration bound
    CHECK_THROWS_AS(make_micro_config(derive_params(3, 1, 3, 1, 1, 1, 1, 6)), ConfigError);
}

TEST_CASE("view distribution certifies independence by exact counts") {
    // product table: n(x,v,z) = (x+1)(v+2), same shape for both z values
    ViewDistribution prod(2, 2, 2);
    for (uint64_t z = 0; z < 2; ++z)
        for (uint64_t x = 0; x < 2; ++x)
            for (uint64_t v = 0; v < 2; ++v)
                for (uint64_t k = 0; k < (x + 1) * (v + 2); ++k) prod.add(x, v, z);
    CHECK(prod.exactly_independent());
    auto mi0 = prod.mutual_information();
    CHECK(mi0.representable);
    CHECK(mi0.bits == Rational(0));
    CHECK(mi0.estimate == 0.0L);

    // v = x xor z: one full bit of conditional information
    ViewDistribution xorbit(2, 2, 2);
    for (uint64_t z = 0; z < 2; ++z)
        for (uint64_t x = 0; x < 2; ++x) xorbit.add(x, x ^ z, z);
    CHECK_FALSE(xorbit.exactly_independent());
    auto mi1 = xorbit.mutual_information();
    CHECK(mi1.representable);
    CHECK(mi1.bits == Rational(1));
    CHECK(std::abs((double)(mi1.estimate - 1.0L)) < 1e-15);

    // v = x over three values: log2(3) has no exact binary representation
    ViewDistribution trit(3, 3, 1);
    for (uint64_t x = 0; x < 3; ++x) trit.add(x, x, 0);
    CHECK_FALSE(trit.exactly_independent());
    auto mi3 = trit.mutual_information();
    CHECK_FALSE(mi3.representable);
    CHECK(std::abs((double)(mi3.estimate - log2l(3.0L))) < 1e-15);

    // a forbidden combination is a dependence even with flat marginals
    ViewDistribution hole(2, 2, 1);
    hole.add(0, 0, 0);
    hole.add(0, 1, 0);
    hole.add(1, 0, 0);
    CHECK_FALSE(hole.exactly_independent());
    CHECK(hole.mutual_information().estimate > 0.0L);

    CHECK(prod.total() == 2 * (1 * 2 + 1 * 3 + 2 * 2 + 2 * 3));
    CHECK(xorbit.occupied_cells() == 4);
}

TEST_CASE("data privacy on three clients matches a hand enumeration") {
    // n=3, T=1, rho=3, z_s=1, q=5: colluder 1 sees one share of each other
    // client, blinded by one uniform coin. 2^3 labels, 5^3 coins.
    MicroConfig mc = micro(3, 1, 3, 1, 1, 1);
    REQUIRE(mc.cfg.q == 5);
    PrimeField f(5);
    auto pts = f.eval_points(3);

    std::map<std::tuple<uint64_t, uint64_t, uint64_t>, uint64_t> counts;
    for (uint64_t y0 = 0; y0 < 2; ++y0)
        for (uint64_t y1 = 0; y1 < 2; ++y1)
            for (uint64_t y2 = 0; y2 < 2; ++y2)
                for (uint64_t r0 = 0; r0 < 5; ++r0)
                    for (uint64_t r1 = 0; r1 < 5; ++r1)
                        for (uint64_t r2 = 0; r2 < 5; ++r2) {
                            uint64_t m1 = (y1 + r1 * pts[0]) % 5; // from client 2
                            uint64_t m2 = (y2 + r2 * pts[0]) % 5; // from client 3
                            counts[{y1, m1 * 5 + m2, y0}] += 1;
                        }
    CHECK(indep_oracle(counts));

    AuditOptions opt;
    opt.cross_check_every = 1; // every state re-run through the protocol stack
    MIAudit r = audit_data_privacy(mc, {0}, 1, opt);
    CHECK(r.states == 1000);
    CHECK(r.cross_checks == 1000);
    CHECK(r.exact_zero);
    CHECK(r.representable);
    CHECK(r.bits == Rational(0));
    CHECK(r.cells == counts.size());
}

TEST_CASE("every colluder and target stays blind on the triangle") {
    MicroConfig mc = micro(3, 1, 3, 1, 1, 1);
    AuditOptions opt;
    opt.cross_check_every = 97;
    for (int colluder = 0; colluder < 3; ++colluder) {
        for (int target = 0; target < 3; ++target) {
            if (target == colluder) continue;
            MIAudit r = audit_data_privacy(mc, {colluder}, target, opt);
            CAPTURE(colluder);
            CAPTURE(target);
            CHECK(r.exact_zero);
        }
    }
}

TEST_CASE("multi-partition and double-blinded sharing stay private") {
    // s=2 splits the stream into two blocks, each with its own coin
    MIAudit two_parts = audit_data_privacy(micro(4, 1, 3, 1, 1, 2), {1}, 0, {});
    CHECK(two_parts.exact_zero);
    CHECK(two_parts.states == (1ULL << 6) * 5 * 5 * 5 * 5 * 5 * 5);

    // z_s=2 tolerates a pair of colluders
    MIAudit pair_safe = audit_data_privacy(micro(4, 1, 4, 2, 1, 1), {0, 1}, 2, {});
    CHECK(pair_safe.exact_zero);
    CHECK(pair_safe.states == (1ULL << 4) * 390625);
}

TEST_CASE("one colluder beyond the sharing tolerance reads the target") {
    MicroConfig mc = micro(3, 1, 3, 1, 1, 1);
    CHECK_THROWS_AS(audit_data_privacy(mc, {0, 2}, 1, {}), ConfigError);

    AuditOptions opt;
    opt.oversize_collusion = true;
    MIAudit r = audit_data_privacy(mc, {0, 2}, 1, opt);
    CHECK_FALSE(r.exact_zero);
    // two shares of a once-blinded polynomial determine it: one full bit
    CHECK(r.representable);
    CHECK(r.bits == Rational(1));
}

TEST_CASE("data privacy rejects malformed colluder sets") {
    MicroConfig mc = micro(3, 1, 3, 1, 1, 1);
    CHECK_THROWS_AS(audit_data_privacy(mc, {}, 1, {}), ConfigError);
    CHECK_THROWS_AS(audit_data_privacy(mc, {1}, 1, {}), ConfigError);
    CHECK_THROWS_AS(audit_data_privacy(mc, {0}, 5, {}), ConfigError);
    CHECK_THROWS_AS(audit_data_privacy(mc, {2, 0}, 1, {}), ConfigError);
}

TEST_CASE("pinned labels carry nothing to leak") {
    AuditOptions opt;
    opt.pin_labels_zero = true;
    MIAudit r = audit_data_privacy(micro(3, 1, 3, 1, 1, 1), {0}, 1, opt);
    CHECK(r.states == 125);
    CHECK(r.exact_zero);
}

TEST_CASE("blinded queries hide the objective exactly") {
    MicroConfig mc = micro(3, 2, 3, 1, 1, 1);
    AuditOptions opt;
    opt.pin_share_coins_zero = true;
    opt.cross_check_every = 11;
    MIAudit r = audit_objective_hiding(mc, {0}, opt);
    CHECK(r.states == (1ULL << 6) * 25 * 2);
    CHECK(r.exact_zero);

    // deterministic: the same enumeration gives the same table
    MIAudit again = audit_objective_hiding(mc, {0}, opt);
    CHECK(again.cells == r.cells);
    CHECK(again.states == r.states);
    CHECK(again.exact_zero == r.exact_zero);
}

TEST_CASE("two colluders pooling query points learn nothing") {
    MicroConfig pool = micro(4, 2, 4, 1, 2, 1);
    AuditOptions sliced;
    sliced.pin_labels_zero = true;
    sliced.pin_share_coins_zero = true;
    for (int i2 = 1; i2 < 4; ++i2) {
        MIAudit r = audit_objective_hiding(pool, {0, i2}, sliced);
        CAPTURE(i2);
        CHECK(r.states == 2 * 625);
        CHECK(r.exact_zero);
    }
    // the same audit without the slice pins would enumerate 1.25e11 states
    CHECK_THROWS_AS(audit_objective_hiding(pool, {0, 1}, {}), GuardError);
    CHECK_THROWS_AS(audit_objective_hiding(pool, {0, 1, 2}, sliced), ConfigError);
}

TEST_CASE("unblinded queries reveal exactly the objective entropy") {
    AuditOptions opt;
    opt.zero_query_coins = true;
    opt.pin_share_coins_zero = true;
    MIAudit r = audit_objective_hiding(micro(3, 2, 3, 1, 1, 1), {0}, opt);
    CHECK(r.states == (1ULL << 6) * 2);
    CHECK_FALSE(r.exact_zero);
    CHECK(r.representable);
    CHECK(r.bits == Rational(1)); // H(J) for T = 2
}

TEST_CASE("the federator learns nothing beyond the queried aggregate") {
    AuditOptions full;
    full.cross_check_every = 97;
    MIAudit single = audit_federator_privacy(micro(3, 1, 3, 1, 1, 1, 1, true), full);
    CHECK(single.states == 8ULL * 125 * 5 * 25);
    CHECK(single.exact_zero);

    AuditOptions sliced;
    sliced.pin_share_coins_zero = true;
    sliced.cross_check_every = 11;
    for (int j1 = 1; j1 <= 2; ++j1) {
        MIAudit r = audit_federator_privacy(micro(4, 2, 3, 1, 1, 1, j1, true), sliced);
        CAPTURE(j1);
        CHECK(r.states == (1ULL << 6) * 25 * 25);
        CHECK(r.exact_zero);
    }
}

TEST_CASE("plain answers leak interference to the federator") {
    AuditOptions opt;
    opt.pin_share_coins_zero = true;
    opt.plain_answers = true;
    MIAudit r = audit_federator_privacy(micro(3, 2, 3, 1, 1, 1, 1, true), opt);
    CHECK_FALSE(r.exact_zero);
    CHECK(r.bits_estimate > 0.0L);

    CHECK_THROWS_AS(audit_federator_privacy(micro(3, 2, 3, 1, 1, 1, 1, false), {}), ConfigError);
}

TEST_CASE("exhaustive correctness over every randomness assignment") {
    CorrectnessAudit plain = correctness_oracle(micro(3, 1, 3, 1, 1, 1));
    CHECK(plain.states == 8ULL * 125 * 5);
    CHECK(plain.pass);

    CorrectnessAudit sym = correctness_oracle(micro(3, 1, 3, 1, 1, 1, 1, true));
    CHECK(sym.states == 8ULL * 125 * 5 * 25);
    CHECK(sym.pass);

    AuditOptions sliced;
    sliced.pin_share_coins_zero = true;
    CorrectnessAudit second = correctness_oracle(micro(4, 2, 3, 1, 1, 1, 2, true), sliced);
    CHECK(second.states == (1ULL << 6) * 25 * 25);
    CHECK(second.pass);
}

TEST_CASE("corrupted decoding weights are caught") {
    // q must exceed 5 here: with q=5 and n=4 the points fill the whole
    // multiplicative group, so a rotated point vector merely rescales each
    // objective's weights by a common factor and decodes identically.
    AuditOptions opt;
    opt.pin_labels_zero = true;
    opt.pin_share_coins_zero = true;
    opt.corrupt_duals = true;
    CorrectnessAudit r = correctness_oracle(micro(4, 2, 3, 1, 1, 1, 1, true, 7), opt);
    CHECK_FALSE(r.pass);
    CHECK(r.mismatches > 0);

    CorrectnessAudit honest = correctness_oracle(micro(4, 2, 3, 1, 1, 1, 1, true, 7),
                                                 [] {
                                                     AuditOptions o;
                                                     o.pin_labels_zero = true;
                                                     o.pin_share_coins_zero = true;
                                                     return o;
                                                 }());
    CHECK(honest.pass);
}

TEST_CASE("suite report lists every entry under its definition") {
    SuiteResult suite;
    SuiteEntry a;
    a.name = "data privacy, demo";
    a.definition = "data";
    a.pass = true;
    a.states = 42;
    a.mi_text = "0 (exact)";
    a.detail = "n=3";
    SuiteEntry b = a;
    b.name = "control: demo";
    b.definition = "data";
    b.is_control = true;
    b.pass = false;
    suite.entries = {a, b};
    suite.all_pass = false;
    std::ostringstream os;
    write_suite_report(suite, os);
    std::string text = os.str();
    CHECK(text.find("[data]") != std::string::npos);
    CHECK(text.find("pass  data privacy, demo") != std::string::npos);
    CHECK(text.find("FAIL  control: demo") != std::string::npos);
    CHECK(text.find("MI=0 (exact)") != std::string::npos);
    CHECK(text.find("1 FAILED") != std::string::npos);
}
