#include "fedpir/audit.hpp"

#include "fedpir/errors.hpp"
#include "fedpir/field.hpp"
#include "fedpir/labels.hpp"
#include "fedpir/sharing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace fedpir {

namespace {

uint64_t ipow_u64(uint64_t b, int e) {
    uint64_t out = 1;
    for (int k = 0; k < e; ++k) out *= b;
    return out;
}

std::string set_to_string(const std::vector<int>& v) {
    std::string out = "{";
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) out += ",";
        out += std::to_string(v[k] + 1);
    }
    return out + "}";
}

// Everything the enumerations share: derived structures of one micro config.
struct Model {
    ProtocolConfig cfg;
    TaskAssignment a;
    PrimeField f;
    std::vector<uint64_t> pts;
    DualTable duals;
    int P = 0;
    int w = 0;
    std::vector<std::pair<int, int>> pairs; // (client, objective), objective-major
    std::vector<std::vector<int>> edge;     // t -> storing clients
    std::vector<std::vector<int>> tasks;    // i -> stored objectives
    std::vector<std::vector<uint64_t>> pw;  // pw[i][d] = alpha_i^d

    explicit Model(const MicroConfig& mc)
        : cfg(mc.cfg), a(mc.a), f(mc.cfg.q), pts(f.eval_points(mc.cfg.n)),
          duals(build_dual_table(a, pts, f)), P(cfg.partitions()), w(cfg.width()) {
        edge.resize(cfg.T);
        tasks.resize(cfg.n);
        for (int t = 0; t < cfg.T; ++t) {
            edge[t] = a.incident_clients(t);
            for (int i : edge[t]) {
                pairs.push_back({i, t});
                tasks[i].push_back(t);
            }
        }
        int maxdeg = cfg.k_C + cfg.z_q + cfg.rho + 2;
        pw.assign(cfg.n, {});
        for (int i = 0; i < cfg.n; ++i) {
            pw[i].assign(maxdeg + 1, 1);
            for (int d = 1; d <= maxdeg; ++d) pw[i][d] = f.mul(pw[i][d - 1], pts[i]);
        }
    }
};

// Per-(client, objective) digit table. One digit jointly indexes the pair's
// label stream and its sharing coins; evaluations of the resulting share
// polynomials at every client point are precomputed so the enumeration's hot
// loop is pure table lookups.
struct PairTable {
    int i = 0, t = 0;
    uint64_t lab_count = 1;
    uint64_t coin_count = 1;
    uint64_t count = 1;
    std::vector<std::vector<uint8_t>> labs;   // [lab_idx] -> s*c label values
    std::vector<std::vector<uint64_t>> coins; // [coin_idx] -> P*z_s coin values
    std::vector<uint64_t> labcode;            // [digit] -> base-gamma stream code
    std::vector<const uint8_t*> lab_row;      // [digit] -> label values of the digit
    std::vector<std::vector<uint64_t>> eval;  // [digit] -> share value per dst*P+p

    const std::vector<uint8_t>& labs_of(uint64_t digit) const {
        return labs[digit / coin_count];
    }
    const std::vector<uint64_t>& coins_of(uint64_t digit) const {
        return coins[digit % coin_count];
    }
};

PairTable build_pair_table(const Model& m, int i, int t, bool enum_labels, bool enum_coins) {
    const ProtocolConfig& cfg = m.cfg;
    int sc = cfg.s * cfg.c;
    int zs = cfg.z_s;
    PairTable tab;
    tab.i = i;
    tab.t = t;
    tab.lab_count = enum_labels ? ipow_u64(cfg.gamma, sc) : 1;
    tab.coin_count = enum_coins ? ipow_u64(cfg.q, m.P * zs) : 1;
    tab.count = tab.lab_count * tab.coin_count;

    tab.labs.resize(tab.lab_count);
    for (uint64_t li = 0; li < tab.lab_count; ++li) {
        tab.labs[li].assign(sc, 0);
        uint64_t rem = li;
        for (int slot = 0; slot < sc; ++slot) {
            tab.labs[li][slot] = (uint8_t)(rem % cfg.gamma);
            rem /= cfg.gamma;
        }
    }
    tab.coins.resize(tab.coin_count);
    for (uint64_t ci = 0; ci < tab.coin_count; ++ci) {
        tab.coins[ci].assign((std::size_t)m.P * zs, 0);
        uint64_t rem = ci;
        for (int k = 0; k < m.P * zs; ++k) {
            tab.coins[ci][k] = rem % cfg.q;
            rem /= cfg.q;
        }
    }
    tab.labcode.resize(tab.count);
    tab.lab_row.resize(tab.count);
    tab.eval.resize(tab.count);
    for (uint64_t digit = 0; digit < tab.count; ++digit) {
        uint64_t li = digit / tab.coin_count;
        const auto& lab = tab.labs[li];
        const auto& coin = tab.coins[digit % tab.coin_count];
        tab.labcode[digit] = li;
        tab.lab_row[digit] = lab.data();
        auto& ev = tab.eval[digit];
        ev.assign((std::size_t)cfg.n * m.P, 0);
        for (int dst = 0; dst < cfg.n; ++dst) {
            for (int p = 0; p < m.P; ++p) {
                uint64_t v = 0;
                for (int d = 0; d < m.w; ++d) {
                    int slot = p * m.w + d;
                    uint64_t coef = slot < sc ? lab[slot] : 0;
                    v = m.f.add(v, m.f.mul(coef, m.pw[dst][d]));
                }
                for (int tau = 0; tau < zs; ++tau)
                    v = m.f.add(v, m.f.mul(coin[(std::size_t)p * zs + tau], m.pw[dst][m.w + tau]));
                ev[(std::size_t)dst * m.P + p] = v;
            }
        }
    }
    return tab;
}

std::vector<PairTable> build_tables(const Model& m, const AuditOptions& opt) {
    std::vector<PairTable> tabs;
    tabs.reserve(m.pairs.size());
    for (auto [i, t] : m.pairs)
        tabs.push_back(build_pair_table(m, i, t, !opt.pin_labels_zero, !opt.pin_share_coins_zero));
    return tabs;
}

// Mixed-radix counter over all enumerated dimensions, with the state guard
// applied before anything is allocated or looped.
struct Odometer {
    std::vector<uint64_t> radix;
    std::vector<uint64_t> d;

    void push(uint64_t r) { radix.push_back(r); }

    uint64_t guard(const std::string& who) {
        __uint128_t total = 1;
        for (uint64_t r : radix) {
            total *= r;
            if (total > kAuditStateGuard)
                throw GuardError(who + ": enumeration space exceeds " +
                                 std::to_string(kAuditStateGuard) + " states");
        }
        d.assign(radix.size(), 0);
        return (uint64_t)total;
    }

    bool next() {
        for (std::size_t k = 0; k < d.size(); ++k) {
            if (++d[k] < radix[k]) return true;
            d[k] = 0;
        }
        return false;
    }
};

uint64_t checked_space(__uint128_t v, const std::string& who) {
    if (v > ((__uint128_t)1 << 62))
        throw GuardError(who + ": joint index space too large to address");
    return (uint64_t)v;
}

// Production-stack rebuild of one enumerated state, used by the cross checks
// and the correctness oracle. It keeps the audits honest: the lookup tables
// must agree with the regular pipeline on every value they summarize.
struct StateRebuild {
    LabelSet ls;
    ShareRandomness rnd;
    PartitionedLabels pl;
    ShareBatch batch;
    StorageState storage;

    StateRebuild(const Model& m, const std::vector<PairTable>& tabs,
                 const std::vector<uint64_t>& d) {
        const ProtocolConfig& cfg = m.cfg;
        ls.s = cfg.s;
        ls.c = cfg.c;
        ls.gamma = cfg.gamma;
        rnd.z_s = cfg.z_s;
        for (std::size_t pi = 0; pi < m.pairs.size(); ++pi) {
            auto [i, t] = m.pairs[pi];
            const auto& lab = tabs[pi].labs_of(d[pi]);
            const auto& coin = tabs[pi].coins_of(d[pi]);
            ls.y[{i, t}] = std::vector<uint32_t>(lab.begin(), lab.end());
            auto& r = rnd.r[{i, t}];
            r.assign(m.P, std::vector<uint64_t>(cfg.z_s));
            for (int p = 0; p < m.P; ++p)
                for (int tau = 0; tau < cfg.z_s; ++tau)
                    r[p][tau] = coin[(std::size_t)p * cfg.z_s + tau];
        }
        pl = partition(ls, cfg.k_C, cfg.z_s);
        batch = encode_shares(pl, m.a, m.f, m.pts, rnd);
        storage = aggregate_shares(batch, m.a, m.f);
    }
};

void check_tables_against_stack(const Model& m, const std::vector<PairTable>& tabs,
                                const std::vector<uint64_t>& d, const StateRebuild& rb,
                                uint64_t state_no) {
    for (std::size_t pi = 0; pi < m.pairs.size(); ++pi) {
        auto [src, t] = m.pairs[pi];
        for (int dst : m.edge[t]) {
            for (int p = 0; p < m.P; ++p) {
                uint64_t expect = tabs[pi].eval[d[pi]][(std::size_t)dst * m.P + p];
                if (rb.batch.at(src, dst, t, p) != expect)
                    throw ProtocolError("audit cross-check: share table diverged from the "
                                        "protocol stack at state " + std::to_string(state_no));
            }
        }
    }
}

QueryRandomness qcoins_from_digits(const Model& m, const std::vector<uint64_t>& d,
                                   std::size_t base, bool pinned) {
    QueryRandomness qr = zero_query_randomness(m.cfg.T, m.P, m.cfg.z_q);
    if (pinned) return qr;
    std::size_t k = base;
    for (int t = 0; t < m.cfg.T; ++t)
        for (int p = 0; p < m.P; ++p)
            for (int tau = 0; tau < m.cfg.z_q; ++tau) qr.k[{t, p}][tau] = d[k++];
    return qr;
}

SharedMask mask_from_digits(const Model& m, const std::vector<uint64_t>& d, std::size_t base) {
    SharedMask mask = zero_shared_mask(m.cfg);
    std::size_t k = base;
    for (int p = 0; p < m.P; ++p)
        for (int e = 0; e < m.cfg.interference_terms(); ++e) mask.coeffs[p][e] = d[k++];
    return mask;
}

std::string config_line(const ProtocolConfig& cfg) {
    std::ostringstream os;
    os << "n=" << cfg.n << " T=" << cfg.T << " rho=" << cfg.rho << " z_s=" << cfg.z_s
       << " z_q=" << cfg.z_q << " s=" << cfg.s << " c=" << cfg.c << " gamma=" << cfg.gamma
       << " q=" << cfg.q << (cfg.symmetric ? " symmetric" : "");
    return os.str();
}

void require_clients(const ProtocolConfig& cfg, const std::vector<int>& set,
                     const std::string& who) {
    if (set.empty()) throw ConfigError(who + ": empty colluder set");
    for (std::size_t k = 0; k < set.size(); ++k) {
        if (set[k] < 0 || set[k] >= cfg.n) throw ConfigError(who + ": client id out of range");
        if (k > 0 && set[k] <= set[k - 1])
            throw ConfigError(who + ": colluders must be ascending and distinct");
    }
}

} // namespace

MicroConfig make_micro_config(const ProtocolConfig& cfg) {
    if (cfg.n > 4) throw ConfigError("audit: n must be at most 4 for exhaustive enumeration");
    if (cfg.T > 2) throw ConfigError("audit: T must be at most 2 for exhaustive enumeration");
    if (cfg.s > 2) throw ConfigError("audit: s must be at most 2 for exhaustive enumeration");
    if (cfg.c != 1) throw ConfigError("audit: c must be 1 for exhaustive enumeration");
    if (cfg.q > 13) throw ConfigError("audit: q must be at most 13 for exhaustive enumeration");
    return MicroConfig{cfg, build_cyclic_assignment(cfg.n, cfg.T, cfg.rho)};
}

// Counts indexed by a flat key, dense below a fixed memory cap and hashed
// above it. Occupied keys never exceed the enumerated state count, so the
// hashed form stays small even when the index space is wide.
namespace {

class CountMap {
  public:
    explicit CountMap(uint64_t space) : space_(space) {
        constexpr uint64_t kDenseCap = 1ULL << 22;
        dense_ = space <= kDenseCap;
        if (dense_) d_.assign(space, 0);
    }

    void inc(uint64_t key) {
        if (dense_) ++d_[key];
        else ++s_[key];
    }

    uint64_t at(uint64_t key) const {
        if (dense_) return d_[key];
        auto it = s_.find(key);
        return it == s_.end() ? 0 : it->second;
    }

    uint64_t occupied() const {
        if (!dense_) return s_.size();
        uint64_t n = 0;
        for (uint64_t c : d_)
            if (c) ++n;
        return n;
    }

    template <class F> void for_each(F f) const {
        if (dense_) {
            for (uint64_t k = 0; k < d_.size(); ++k)
                if (d_[k]) f(k, d_[k]);
        } else {
            for (const auto& [k, c] : s_) f(k, c);
        }
    }

  private:
    uint64_t space_;
    bool dense_ = true;
    std::vector<uint64_t> d_;
    std::unordered_map<uint64_t, uint64_t> s_;
};

} // namespace

struct ViewDistribution::Impl {
    uint64_t nx, nv, nz;
    CountMap joint, xz, vz;
    std::vector<uint64_t> zc;
    uint64_t total = 0;

    Impl(uint64_t x, uint64_t v, uint64_t z)
        : nx(x), nv(v), nz(z),
          joint(checked_space((__uint128_t)x * v * z, "view distribution")),
          xz(checked_space((__uint128_t)x * z, "view distribution")),
          vz(checked_space((__uint128_t)v * z, "view distribution")), zc(z, 0) {}
};

ViewDistribution::ViewDistribution(uint64_t nx, uint64_t nv, uint64_t nz)
    : impl_(new Impl(nx, nv, nz)) {}

ViewDistribution::~ViewDistribution() = default;
ViewDistribution::ViewDistribution(ViewDistribution&&) noexcept = default;
ViewDistribution& ViewDistribution::operator=(ViewDistribution&&) noexcept = default;

void ViewDistribution::add(uint64_t x, uint64_t v, uint64_t z) {
    Impl& m = *impl_;
    m.joint.inc((x * m.nv + v) * m.nz + z);
    m.xz.inc(x * m.nz + z);
    m.vz.inc(v * m.nz + z);
    ++m.zc[z];
    ++m.total;
}

uint64_t ViewDistribution::total() const { return impl_->total; }

uint64_t ViewDistribution::occupied_cells() const { return impl_->joint.occupied(); }

bool ViewDistribution::exactly_independent() const {
    const Impl& m = *impl_;
    // Occupied cells must satisfy the exact product identity, and the support
    // itself must be a product set for each conditioning value; together these
    // cover every cell of the full (x, v) grid, the absent ones included.
    bool ok = true;
    m.joint.for_each([&](uint64_t key, uint64_t cnt) {
        if (!ok) return;
        uint64_t z = key % m.nz;
        uint64_t v = (key / m.nz) % m.nv;
        uint64_t x = key / m.nz / m.nv;
        __uint128_t lhs = (__uint128_t)cnt * m.zc[z];
        __uint128_t rhs = (__uint128_t)m.xz.at(x * m.nz + z) * m.vz.at(v * m.nz + z);
        if (lhs != rhs) ok = false;
    });
    if (!ok) return false;
    std::vector<uint64_t> occ_x(m.nz, 0), occ_v(m.nz, 0), occ_xv(m.nz, 0);
    m.xz.for_each([&](uint64_t key, uint64_t) { ++occ_x[key % m.nz]; });
    m.vz.for_each([&](uint64_t key, uint64_t) { ++occ_v[key % m.nz]; });
    m.joint.for_each([&](uint64_t key, uint64_t) { ++occ_xv[key % m.nz]; });
    for (uint64_t z = 0; z < m.nz; ++z)
        if ((__uint128_t)occ_xv[z] != (__uint128_t)occ_x[z] * occ_v[z]) return false;
    return true;
}

ViewDistribution::MI ViewDistribution::mutual_information() const {
    const Impl& m = *impl_;
    MI out;
    if (exactly_independent()) {
        out.representable = true;
        out.bits = Rational(0);
        out.estimate = 0;
        return out;
    }
    long double est = 0;
    m.joint.for_each([&](uint64_t key, uint64_t cnt) {
        uint64_t z = key % m.nz;
        uint64_t v = (key / m.nz) % m.nv;
        uint64_t x = key / m.nz / m.nv;
        est += (long double)cnt *
               (log2l((long double)cnt) + log2l((long double)m.zc[z]) -
                log2l((long double)m.xz.at(x * m.nz + z)) -
                log2l((long double)m.vz.at(v * m.nz + z)));
    });
    out.estimate = est / (long double)m.total;
    if (out.estimate < 0 && out.estimate > -1e-9L) out.estimate = 0;

    // The exact value in bits exists whenever every per-cell probability ratio
    // n(x,v,z) n(z) / (n(x,z) n(v,z)) is a power of two: accumulate prime
    // exponents of the ratios weighted by the cell counts and check that all
    // odd primes cancel.
    if (occupied_cells() > 2000000) return out;
    std::unordered_map<uint64_t, std::vector<std::pair<uint64_t, int>>> cache;
    auto factors = [&](uint64_t v) -> const std::vector<std::pair<uint64_t, int>>& {
        auto it = cache.find(v);
        if (it != cache.end()) return it->second;
        std::vector<std::pair<uint64_t, int>> fs;
        uint64_t rem = v;
        for (uint64_t p = 2; p * p <= rem; ++p) {
            if (rem % p) continue;
            int e = 0;
            while (rem % p == 0) rem /= p, ++e;
            fs.push_back({p, e});
        }
        if (rem > 1) fs.push_back({rem, 1});
        return cache.emplace(v, std::move(fs)).first->second;
    };
    std::map<uint64_t, __int128> exps;
    m.joint.for_each([&](uint64_t key, uint64_t cnt) {
        uint64_t z = key % m.nz;
        uint64_t v = (key / m.nz) % m.nv;
        uint64_t x = key / m.nz / m.nv;
        auto acc = [&](uint64_t value, int sign) {
            for (auto [p, e] : factors(value)) exps[p] += (__int128)sign * e * (__int128)cnt;
        };
        acc(cnt, +1);
        acc(m.zc[z], +1);
        acc(m.xz.at(x * m.nz + z), -1);
        acc(m.vz.at(v * m.nz + z), -1);
    });
    __int128 e2 = 0;
    bool rep = true;
    for (auto& [p, e] : exps) {
        if (p == 2) e2 = e;
        else if (e != 0) rep = false;
    }
    if (rep) {
        out.representable = true;
        out.bits = Rational(e2, (__int128)m.total);
    }
    return out;
}

namespace {

MIAudit finish_audit(const ViewDistribution& vd, uint64_t states, uint64_t crosses,
                     std::string detail) {
    if (vd.total() != states)
        throw ProtocolError("audit: joint counts do not sum to the enumeration space");
    MIAudit out;
    auto mi = vd.mutual_information();
    out.exact_zero = vd.exactly_independent();
    out.representable = mi.representable;
    out.bits = mi.bits;
    out.bits_estimate = mi.estimate;
    out.states = states;
    out.cells = vd.occupied_cells();
    out.cross_checks = crosses;
    out.detail = std::move(detail);
    return out;
}

std::string pin_note(const AuditOptions& opt) {
    std::string out;
    if (opt.pin_labels_zero) out += ", labels pinned to zero";
    if (opt.pin_share_coins_zero) out += ", share coins pinned to zero";
    if (opt.zero_query_coins) out += ", query coins pinned to zero";
    return out;
}

} // namespace

MIAudit audit_data_privacy(const MicroConfig& mc, const std::vector<int>& colluders,
                           int target_client, const AuditOptions& opt) {
    const ProtocolConfig& cfg = mc.cfg;
    require_clients(cfg, colluders, "audit_data_privacy");
    if (target_client < 0 || target_client >= cfg.n)
        throw ConfigError("audit_data_privacy: target client out of range");
    if (std::find(colluders.begin(), colluders.end(), target_client) != colluders.end())
        throw ConfigError("audit_data_privacy: target client cannot collude");
    int allowed = cfg.z_s + (opt.oversize_collusion ? 1 : 0);
    if ((int)colluders.size() > allowed)
        throw ConfigError("audit_data_privacy: more than z_s colluders");

    Model m(mc);
    std::vector<PairTable> tabs = build_tables(m, opt);

    Odometer od;
    for (const auto& tab : tabs) od.push(tab.count);
    uint64_t states = od.guard("audit_data_privacy");

    std::vector<int> x_pairs, z_pairs; // table indices
    for (std::size_t pi = 0; pi < m.pairs.size(); ++pi) {
        if (m.pairs[pi].first == target_client) x_pairs.push_back((int)pi);
        if (std::find(colluders.begin(), colluders.end(), m.pairs[pi].first) != colluders.end())
            z_pairs.push_back((int)pi);
    }
    // Received messages: every share any colluder gets from another client.
    struct Msg {
        int pi;
        std::size_t off;
    };
    std::vector<Msg> msgs;
    for (int i1 : colluders) {
        for (std::size_t pi = 0; pi < m.pairs.size(); ++pi) {
            auto [i2, t] = m.pairs[pi];
            if (i2 == i1) continue;
            if (m.a.incidence[i1][t] == 0) continue;
            for (int p = 0; p < m.P; ++p) msgs.push_back({(int)pi, (std::size_t)i1 * m.P + p});
        }
    }

    uint64_t lab_radix = tabs.empty() ? 1 : tabs[0].lab_count;
    uint64_t nx = 1, nz = 1;
    for (std::size_t k = 0; k < x_pairs.size(); ++k) nx *= lab_radix;
    for (std::size_t k = 0; k < z_pairs.size(); ++k) nz *= lab_radix;
    uint64_t nv = 1;
    for (std::size_t k = 0; k < msgs.size(); ++k)
        nv = checked_space((__uint128_t)nv * cfg.q, "audit_data_privacy");

    ViewDistribution vd(nx, nv, nz);
    uint64_t state_no = 0, crosses = 0;
    do {
        uint64_t x = 0, v = 0, z = 0;
        for (int pi : x_pairs) x = x * lab_radix + tabs[pi].labcode[od.d[pi]];
        for (int pi : z_pairs) z = z * lab_radix + tabs[pi].labcode[od.d[pi]];
        for (const Msg& mm : msgs) v = v * cfg.q + tabs[mm.pi].eval[od.d[mm.pi]][mm.off];
        vd.add(x, v, z);
        if (opt.cross_check_every && state_no % opt.cross_check_every == 0) {
            StateRebuild rb(m, tabs, od.d);
            check_tables_against_stack(m, tabs, od.d, rb, state_no);
            ++crosses;
        }
        ++state_no;
    } while (od.next());

    std::ostringstream detail;
    detail << config_line(cfg) << ", colluders=" << set_to_string(colluders)
           << ", target=" << target_client + 1 << pin_note(opt);
    return finish_audit(vd, states, crosses, detail.str());
}

MIAudit audit_objective_hiding(const MicroConfig& mc, const std::vector<int>& colluders,
                               const AuditOptions& opt) {
    const ProtocolConfig& cfg = mc.cfg;
    require_clients(cfg, colluders, "audit_objective_hiding");
    int allowed = cfg.z_q + (opt.oversize_collusion ? 1 : 0);
    if ((int)colluders.size() > allowed)
        throw ConfigError("audit_objective_hiding: more than z_q colluders");

    Model m(mc);
    std::vector<PairTable> tabs = build_tables(m, opt);

    Odometer od;
    for (const auto& tab : tabs) od.push(tab.count);
    std::size_t qbase = od.radix.size();
    int qdigits = cfg.T * m.P * cfg.z_q;
    for (int k = 0; k < qdigits; ++k) od.push(opt.zero_query_coins ? 1 : cfg.q);
    std::size_t jdim = od.radix.size();
    od.push((uint64_t)cfg.T);
    uint64_t states = od.guard("audit_objective_hiding");

    // View inventory per colluder: stored aggregates, received shares, and the
    // query evaluations it is handed, in a fixed order.
    struct StorageOp {
        std::vector<std::pair<int, std::size_t>> terms; // (table, eval offset)
    };
    std::vector<StorageOp> storage_ops;
    struct Msg {
        int pi;
        std::size_t off;
    };
    std::vector<Msg> msgs;
    struct QueryOp {
        int t;
        std::vector<std::pair<int, uint64_t>> coin_terms; // (digit index, power)
    };
    std::vector<QueryOp> query_ops;
    for (int i1 : colluders) {
        for (int t : m.tasks[i1]) {
            for (int p = 0; p < m.P; ++p) {
                StorageOp op;
                for (std::size_t pi = 0; pi < m.pairs.size(); ++pi)
                    if (m.pairs[pi].second == t)
                        op.terms.push_back({(int)pi, (std::size_t)i1 * m.P + p});
                storage_ops.push_back(std::move(op));
            }
        }
        for (std::size_t pi = 0; pi < m.pairs.size(); ++pi) {
            auto [i2, t] = m.pairs[pi];
            if (i2 == i1 || m.a.incidence[i1][t] == 0) continue;
            for (int p = 0; p < m.P; ++p) msgs.push_back({(int)pi, (std::size_t)i1 * m.P + p});
        }
        for (int t : m.tasks[i1]) {
            for (int p = 0; p < m.P; ++p) {
                QueryOp op;
                op.t = t;
                for (int tau = 0; tau < cfg.z_q; ++tau)
                    op.coin_terms.push_back(
                        {(int)(qbase + ((std::size_t)t * m.P + p) * cfg.z_q + tau),
                         m.pw[i1][m.w + tau]});
                query_ops.push_back(std::move(op));
            }
        }
    }

    __uint128_t nv128 = 1;
    for (std::size_t k = 0; k < storage_ops.size() + msgs.size() + query_ops.size(); ++k)
        nv128 *= cfg.q;
    uint64_t nv = checked_space(nv128, "audit_objective_hiding");

    ViewDistribution vd((uint64_t)cfg.T, nv, 1);
    uint64_t state_no = 0, crosses = 0;
    do {
        int J = (int)od.d[jdim];
        uint64_t v = 0;
        for (const auto& op : storage_ops) {
            uint64_t st = 0;
            for (auto [pi, off] : op.terms) st = m.f.add(st, tabs[pi].eval[od.d[pi]][off]);
            v = v * cfg.q + st;
        }
        for (const Msg& mm : msgs) v = v * cfg.q + tabs[mm.pi].eval[od.d[mm.pi]][mm.off];
        for (const auto& op : query_ops) {
            uint64_t qv = op.t == J ? 1 : 0;
            for (auto [dig, power] : op.coin_terms) qv = m.f.add(qv, m.f.mul(od.d[dig], power));
            v = v * cfg.q + qv;
        }
        vd.add((uint64_t)J, v, 0);
        if (opt.cross_check_every && state_no % opt.cross_check_every == 0) {
            StateRebuild rb(m, tabs, od.d);
            check_tables_against_stack(m, tabs, od.d, rb, state_no);
            QueryRandomness qr = qcoins_from_digits(m, od.d, qbase, opt.zero_query_coins);
            QueryBatch qb = build_queries(cfg, m.a, m.f, m.pts, J, qr);
            for (int i1 : colluders) {
                for (int t : m.tasks[i1]) {
                    for (int p = 0; p < m.P; ++p) {
                        uint64_t qv = t == J ? 1 : 0;
                        for (int tau = 0; tau < cfg.z_q; ++tau)
                            qv = m.f.add(qv, m.f.mul(qr.at(t, p)[tau], m.pw[i1][m.w + tau]));
                        if (qb.at(i1, t, p) != qv)
                            throw ProtocolError("audit cross-check: query table diverged from "
                                                "the protocol stack at state " +
                                                std::to_string(state_no));
                        uint64_t st = 0;
                        for (std::size_t pi = 0; pi < m.pairs.size(); ++pi)
                            if (m.pairs[pi].second == t)
                                st = m.f.add(st,
                                             tabs[pi].eval[od.d[pi]][(std::size_t)i1 * m.P + p]);
                        if (rb.storage.at(i1, t, p) != st)
                            throw ProtocolError("audit cross-check: storage diverged from the "
                                                "protocol stack at state " +
                                                std::to_string(state_no));
                    }
                }
            }
            ++crosses;
        }
        ++state_no;
    } while (od.next());

    std::ostringstream detail;
    detail << config_line(cfg) << ", colluders=" << set_to_string(colluders) << pin_note(opt);
    return finish_audit(vd, states, crosses, detail.str());
}

MIAudit audit_federator_privacy(const MicroConfig& mc, const AuditOptions& opt) {
    const ProtocolConfig& cfg = mc.cfg;
    if (!cfg.symmetric && !opt.plain_answers)
        throw ConfigError("audit_federator_privacy: configuration must be symmetric");
    bool masked = cfg.symmetric && !opt.plain_answers;
    int j = cfg.j;

    Model m(mc);
    std::vector<PairTable> tabs = build_tables(m, opt);

    Odometer od;
    for (const auto& tab : tabs) od.push(tab.count);
    std::size_t qbase = od.radix.size();
    int qdigits = cfg.T * m.P * cfg.z_q;
    for (int k = 0; k < qdigits; ++k) od.push(opt.zero_query_coins ? 1 : cfg.q);
    std::size_t mbase = od.radix.size();
    int mdigits = masked ? m.P * cfg.interference_terms() : 0;
    for (int k = 0; k < mdigits; ++k) od.push(cfg.q);
    uint64_t states = od.guard("audit_federator_privacy");

    int sc = cfg.s * cfg.c;
    uint64_t lab_radix = tabs.empty() ? 1 : tabs[0].lab_count;

    // Secret: every label of every pair. Conditioning: the aggregate the
    // federator is entitled to, the plain per-slot sums of objective j over
    // its storing clients.
    uint64_t nx = 1;
    for (std::size_t k = 0; k < m.pairs.size(); ++k)
        nx = checked_space((__uint128_t)nx * lab_radix, "audit_federator_privacy");
    uint64_t sum_radix = (uint64_t)cfg.rho * (cfg.gamma - 1) + 1;
    uint64_t nz = 1;
    for (int slot = 0; slot < sc; ++slot)
        nz = checked_space((__uint128_t)nz * sum_radix, "audit_federator_privacy");

    // View: every answer plus every delivered query evaluation.
    std::vector<int> j_pairs;
    for (std::size_t pi = 0; pi < m.pairs.size(); ++pi)
        if (m.pairs[pi].second == j) j_pairs.push_back((int)pi);
    int answer_digits = cfg.n * m.P;
    int query_digits = 0;
    for (int t = 0; t < cfg.T; ++t) query_digits += (int)m.edge[t].size() * m.P;
    __uint128_t nv128 = 1;
    for (int k = 0; k < answer_digits + query_digits; ++k) nv128 *= cfg.q;
    uint64_t nv = checked_space(nv128, "audit_federator_privacy");

    ViewDistribution vd(nx, nv, nz);
    std::vector<uint64_t> answers((std::size_t)cfg.n * m.P);
    uint64_t state_no = 0, crosses = 0;
    do {
        // storage and queries for all clients, then the answers
        uint64_t v = 0;
        for (int i = 0; i < cfg.n; ++i) {
            for (int p = 0; p < m.P; ++p) {
                uint64_t acc = 0;
                for (int t : m.tasks[i]) {
                    uint64_t st = 0;
                    for (std::size_t pi = 0; pi < m.pairs.size(); ++pi)
                        if (m.pairs[pi].second == t)
                            st = m.f.add(st, tabs[pi].eval[od.d[pi]][(std::size_t)i * m.P + p]);
                    uint64_t qv = t == j ? 1 : 0;
                    for (int tau = 0; tau < cfg.z_q; ++tau)
                        qv = m.f.add(qv,
                                     m.f.mul(od.d[qbase + ((std::size_t)t * m.P + p) * cfg.z_q + tau],
                                             m.pw[i][m.w + tau]));
                    acc = m.f.add(acc, m.f.mul(m.duals.at(t, i), m.f.mul(st, qv)));
                }
                if (masked) {
                    uint64_t mv = 0;
                    for (int e = 0; e < cfg.interference_terms(); ++e)
                        mv = m.f.add(mv, m.f.mul(od.d[mbase + (std::size_t)p *
                                                               cfg.interference_terms() + e],
                                                 m.pw[i][m.w + e]));
                    acc = m.f.add(acc, m.f.mul(m.duals.full[i], mv));
                }
                answers[(std::size_t)i * m.P + p] = acc;
                v = v * cfg.q + acc;
            }
        }
        for (int t = 0; t < cfg.T; ++t) {
            for (int i : m.edge[t]) {
                for (int p = 0; p < m.P; ++p) {
                    uint64_t qv = t == j ? 1 : 0;
                    for (int tau = 0; tau < cfg.z_q; ++tau)
                        qv = m.f.add(qv,
                                     m.f.mul(od.d[qbase + ((std::size_t)t * m.P + p) * cfg.z_q + tau],
                                             m.pw[i][m.w + tau]));
                    v = v * cfg.q + qv;
                }
            }
        }
        uint64_t x = 0, z = 0;
        for (std::size_t pi = 0; pi < m.pairs.size(); ++pi)
            x = x * lab_radix + tabs[pi].labcode[od.d[pi]];
        for (int slot = 0; slot < sc; ++slot) {
            uint64_t sum = 0;
            for (int pi : j_pairs) sum += tabs[pi].lab_row[od.d[pi]][slot];
            z = z * sum_radix + sum;
        }
        vd.add(x, v, z);
        if (opt.cross_check_every && state_no % opt.cross_check_every == 0) {
            StateRebuild rb(m, tabs, od.d);
            check_tables_against_stack(m, tabs, od.d, rb, state_no);
            QueryRandomness qr = qcoins_from_digits(m, od.d, qbase, opt.zero_query_coins);
            QueryBatch qb = build_queries(cfg, m.a, m.f, m.pts, j, qr);
            SharedMask mask =
                masked ? mask_from_digits(m, od.d, mbase) : zero_shared_mask(cfg);
            AnswerBatch ab = collect_answers(cfg, m.a, m.f, m.pts, rb.storage, qb, m.duals,
                                             masked ? &mask : nullptr);
            for (int i = 0; i < cfg.n; ++i)
                for (int p = 0; p < m.P; ++p)
                    if (ab.at(i, p) != answers[(std::size_t)i * m.P + p])
                        throw ProtocolError("audit cross-check: answers diverged from the "
                                            "protocol stack at state " +
                                            std::to_string(state_no));
            ++crosses;
        }
        ++state_no;
    } while (od.next());

    std::ostringstream detail;
    detail << config_line(cfg) << ", j=" << j + 1 << (masked ? "" : ", mask disabled")
           << pin_note(opt);
    return finish_audit(vd, states, crosses, detail.str());
}

CorrectnessAudit correctness_oracle(const MicroConfig& mc, const AuditOptions& opt) {
    const ProtocolConfig& cfg = mc.cfg;
    int j = cfg.j;
    Model m(mc);
    std::vector<PairTable> tabs = build_tables(m, opt);

    // Decoding weights for the deliberately wrong client set: same storing
    // clients, each mapped to its neighbour's evaluation point.
    DualTable duals = m.duals;
    if (opt.corrupt_duals) {
        std::vector<uint64_t> rotated(m.pts.begin(), m.pts.end());
        std::rotate(rotated.begin(), rotated.begin() + 1, rotated.end());
        duals = build_dual_table(m.a, rotated, m.f);
    }

    Odometer od;
    for (const auto& tab : tabs) od.push(tab.count);
    std::size_t qbase = od.radix.size();
    int qdigits = cfg.T * m.P * cfg.z_q;
    for (int k = 0; k < qdigits; ++k) od.push(opt.zero_query_coins ? 1 : cfg.q);
    std::size_t mbase = od.radix.size();
    int mdigits = cfg.symmetric ? m.P * cfg.interference_terms() : 0;
    for (int k = 0; k < mdigits; ++k) od.push(cfg.q);
    uint64_t states = od.guard("correctness_oracle");

    int sc = cfg.s * cfg.c;
    CorrectnessAudit out;
    out.states = states;
    do {
        StateRebuild rb(m, tabs, od.d);
        QueryRandomness qr = qcoins_from_digits(m, od.d, qbase, opt.zero_query_coins);
        QueryBatch qb = build_queries(cfg, m.a, m.f, m.pts, j, qr);
        SharedMask mask = cfg.symmetric ? mask_from_digits(m, od.d, mbase)
                                        : zero_shared_mask(cfg);
        AnswerBatch ab = collect_answers(cfg, m.a, m.f, m.pts, rb.storage, qb, duals,
                                         cfg.symmetric ? &mask : nullptr);
        bool good = true;
        std::vector<std::vector<uint64_t>> blocks;
        try {
            blocks = reconstruct(ab, cfg, m.a, m.f, m.pts, j, duals);
        } catch (const ProtocolError&) {
            good = false;
        }
        if (good) {
            for (int slot = 0; slot < sc && good; ++slot) {
                uint64_t want = 0;
                for (int i : m.edge[j]) want += rb.ls.stream(i, j)[slot];
                want %= cfg.q;
                if (blocks[slot / m.w][slot % m.w] != want) good = false;
            }
        }
        if (!good) {
            ++out.mismatches;
            break;
        }
    } while (od.next());

    out.pass = out.mismatches == 0;
    std::ostringstream detail;
    detail << config_line(cfg) << ", j=" << j + 1 << pin_note(opt)
           << (opt.corrupt_duals ? ", decoding weights off by one client" : "");
    out.detail = detail.str();
    return out;
}

namespace {

SuiteEntry mi_entry(std::string name, std::string definition, bool control, bool detected_ok,
                    const MIAudit& r) {
    SuiteEntry e;
    e.name = std::move(name);
    e.definition = std::move(definition);
    e.is_control = control;
    e.states = r.states;
    std::string mi_text;
    if (r.exact_zero) mi_text = "0 (exact)";
    else if (r.representable) mi_text = to_fraction(r.bits) + " bit (exact)";
    else {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "~%.6Lg bit", r.bits_estimate);
        mi_text = buf;
    }
    e.mi_text = mi_text;
    e.detail = r.detail;
    e.pass = control ? detected_ok : r.exact_zero;
    return e;
}

} // namespace

SuiteResult run_audit_suite(bool include_controls) {
    SuiteResult suite;
    AuditOptions lean;
    lean.cross_check_every = 9973;

    auto micro = [](int n, int T, int rho, int z_s, int z_q, int s, int j1 = 1,
                    bool symmetric = false, std::optional<uint64_t> q = {}) {
        return make_micro_config(
            derive_params(n, T, rho, z_s, z_q, s, 1, 2, q, 7, j1, symmetric));
    };

    // Data privacy: every admissible colluder set against every other client
    // that holds labels.
    struct DataCase {
        MicroConfig mc;
        std::string tag;
    };
    std::vector<DataCase> data_cases;
    data_cases.push_back({micro(3, 1, 3, 1, 1, 1), "triangle"});
    data_cases.push_back({micro(4, 2, 3, 1, 1, 1), "two overlapping objectives"});
    data_cases.push_back({micro(4, 1, 3, 1, 1, 2), "two partitions"});
    data_cases.push_back({micro(4, 1, 4, 2, 1, 1), "two colluders tolerated"});
    for (const auto& dc : data_cases) {
        const ProtocolConfig& cfg = dc.mc.cfg;
        std::vector<std::vector<int>> sets;
        if (cfg.z_s == 1) {
            for (int i = 0; i < cfg.n; ++i) sets.push_back({i});
        } else {
            for (int i1 = 0; i1 < cfg.n; ++i1)
                for (int i2 = i1 + 1; i2 < cfg.n; ++i2) sets.push_back({i1, i2});
        }
        Model m(dc.mc);
        for (const auto& set : sets) {
            for (int target = 0; target < cfg.n; ++target) {
                if (std::find(set.begin(), set.end(), target) != set.end()) continue;
                if (m.tasks[target].empty()) continue;
                MIAudit r = audit_data_privacy(dc.mc, set, target, lean);
                suite.entries.push_back(mi_entry(
                    "data privacy, " + dc.tag + ", colluders=" + set_to_string(set) +
                        ", target=" + std::to_string(target + 1),
                    "data", false, false, r));
            }
        }
    }
    {
        // Degenerate check: constant labels carry no information to leak.
        AuditOptions pinned = lean;
        pinned.pin_labels_zero = true;
        MIAudit r = audit_data_privacy(data_cases[0].mc, {0}, 1, pinned);
        suite.entries.push_back(
            mi_entry("data privacy, triangle, constant labels", "data", false, false, r));
    }

    // Objective hiding: singleton colluders everywhere, then the pooling case
    // where two colluders compare distinct evaluations of one query.
    std::vector<MicroConfig> obj_cases = {micro(3, 2, 3, 1, 1, 1), micro(4, 2, 3, 1, 1, 1)};
    for (const auto& mc : obj_cases) {
        for (int i = 0; i < mc.cfg.n; ++i) {
            Model m(mc);
            if (m.tasks[i].empty()) continue;
            MIAudit r = audit_objective_hiding(mc, {i}, lean);
            suite.entries.push_back(
                mi_entry("objective hiding, n=" + std::to_string(mc.cfg.n) + ", colluder=" +
                             std::to_string(i + 1),
                         "objective", false, false, r));
        }
    }
    {
        MicroConfig pool = micro(4, 2, 4, 1, 2, 1);
        AuditOptions sliced = lean;
        sliced.pin_labels_zero = true;
        sliced.pin_share_coins_zero = true;
        for (int i1 = 0; i1 < 4; ++i1) {
            for (int i2 = i1 + 1; i2 < 4; ++i2) {
                MIAudit r = audit_objective_hiding(pool, {i1, i2}, sliced);
                suite.entries.push_back(mi_entry(
                    "objective hiding, two colluders pooling query points " +
                        set_to_string({i1, i2}),
                    "objective", false, false, r));
            }
        }
    }

    // Privacy from the federator, symmetric mode.
    {
        MIAudit r = audit_federator_privacy(micro(3, 1, 3, 1, 1, 1, 1, true), lean);
        suite.entries.push_back(
            mi_entry("federator privacy, single objective", "federator", false, false, r));
    }
    for (int j1 = 1; j1 <= 2; ++j1) {
        AuditOptions sliced = lean;
        sliced.pin_share_coins_zero = true;
        MIAudit r = audit_federator_privacy(micro(3, 2, 3, 1, 1, 1, j1, true), sliced);
        suite.entries.push_back(mi_entry(
            "federator privacy, two objectives, j=" + std::to_string(j1), "federator", false,
            false, r));
    }
    for (int j1 = 1; j1 <= 2; ++j1) {
        AuditOptions sliced = lean;
        sliced.pin_share_coins_zero = true;
        MIAudit r = audit_federator_privacy(micro(4, 2, 3, 1, 1, 1, j1, true), sliced);
        suite.entries.push_back(
            mi_entry("federator privacy, n=4, j=" + std::to_string(j1), "federator", false,
                     false, r));
    }

    // Exhaustive correctness.
    auto corr_entry = [&](std::string name, const MicroConfig& mc, const AuditOptions& o,
                          bool control) {
        CorrectnessAudit r = correctness_oracle(mc, o);
        SuiteEntry e;
        e.name = std::move(name);
        e.definition = "correctness";
        e.is_control = control;
        e.states = r.states;
        e.detail = r.detail;
        e.pass = control ? !r.pass : r.pass;
        suite.entries.push_back(e);
    };
    corr_entry("correctness, triangle, plain", micro(3, 1, 3, 1, 1, 1), {}, false);
    corr_entry("correctness, triangle, symmetric", micro(3, 1, 3, 1, 1, 1, 1, true), {}, false);
    {
        AuditOptions sliced;
        sliced.pin_share_coins_zero = true;
        corr_entry("correctness, n=4 symmetric, j=1", micro(4, 2, 3, 1, 1, 1, 1, true), sliced,
                   false);
        corr_entry("correctness, n=4 symmetric, j=2", micro(4, 2, 3, 1, 1, 1, 2, true), sliced,
                   false);
    }
    {
        AuditOptions sliced;
        sliced.pin_labels_zero = true;
        corr_entry("correctness, n=4 plain, zero labels, j=1", micro(4, 2, 3, 1, 1, 1, 1),
                   sliced, false);
        corr_entry("correctness, n=4 plain, zero labels, j=2", micro(4, 2, 3, 1, 1, 1, 2),
                   sliced, false);
    }
    {
        AuditOptions sliced;
        sliced.pin_share_coins_zero = true;
        corr_entry("correctness, two colluders tolerated, full replication",
                   micro(4, 1, 4, 2, 1, 1), sliced, false);
    }

    if (include_controls) {
        // Each control seeds one defect and passes only if the audit detects it.
        {
            AuditOptions o = lean;
            o.oversize_collusion = true;
            MIAudit r = audit_data_privacy(data_cases[0].mc, {0, 1}, 2, o);
            suite.entries.push_back(mi_entry(
                "control: one colluder beyond the sharing tolerance", "data", true,
                !r.exact_zero && r.bits_estimate > 0, r));
        }
        {
            AuditOptions o = lean;
            o.zero_query_coins = true;
            o.pin_share_coins_zero = true;
            MIAudit r = audit_objective_hiding(obj_cases[0], {0}, o);
            bool exact_one = r.representable && r.bits == Rational(1);
            suite.entries.push_back(mi_entry(
                "control: queries without blinding reveal the objective", "objective", true,
                !r.exact_zero && exact_one, r));
        }
        {
            AuditOptions o = lean;
            o.pin_share_coins_zero = true;
            o.plain_answers = true;
            MIAudit r = audit_federator_privacy(micro(3, 2, 3, 1, 1, 1, 1, true), o);
            suite.entries.push_back(mi_entry("control: answers without the shared mask",
                                             "federator", true,
                                             !r.exact_zero && r.bits_estimate > 0, r));
        }
        {
            // q=7: over GF(5) a rotated point vector only rescales each
            // objective's weights and decodes identically.
            AuditOptions o;
            o.pin_labels_zero = true;
            o.pin_share_coins_zero = true;
            o.corrupt_duals = true;
            corr_entry("control: decoding weights for the wrong client set",
                       micro(4, 2, 3, 1, 1, 1, 1, true, 7), o, true);
        }
    }

    suite.all_pass = true;
    for (const auto& e : suite.entries)
        if (!e.pass) suite.all_pass = false;
    return suite;
}

void write_suite_report(const SuiteResult& suite, std::ostream& out) {
    out << "exhaustive privacy and correctness audits\n";
    out << "definitions: data privacy = I(target labels; colluder view | colluder labels),\n";
    out << "  objective hiding = I(colluder view; queried objective),\n";
    out << "  federator privacy = I(answers+queries; all labels | queried aggregate),\n";
    out << "  correctness = protocol output equals the queried label sums everywhere\n\n";
    std::string last_def;
    for (const auto& e : suite.entries) {
        if (e.definition != last_def) {
            out << "[" << e.definition << "]\n";
            last_def = e.definition;
        }
        out << (e.pass ? "  pass  " : "  FAIL  ") << e.name << "\n";
        out << "        states=" << e.states;
        if (!e.mi_text.empty()) out << "  MI=" << e.mi_text;
        out << "\n        " << e.detail << "\n";
    }
    uint64_t audits = 0, controls = 0, failed = 0;
    for (const auto& e : suite.entries) {
        (e.is_control ? controls : audits) += 1;
        if (!e.pass) ++failed;
    }
    out << "\n" << audits << " audits, " << controls << " controls, "
        << (failed == 0 ? "all pass" : std::to_string(failed) + " FAILED") << "\n";
}

} // namespace fedpir
