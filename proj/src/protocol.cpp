#include "fedpir/protocol.hpp"

#include "fedpir/errors.hpp"
#include "fedpir/poly.hpp"
#include "fedpir/rng.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace fedpir {

namespace {
constexpr uint64_t kQueryPurpose = 0x51525950; // stream tag for query randomness
constexpr uint64_t kMaskPurpose = 0x4d41534b;  // stream tag for the response mask
} // namespace

ProtocolConfig derive_params(int n, int T, int rho, int z_s, int z_q, int s, int c,
                             uint32_t gamma, std::optional<uint64_t> q_override,
                             uint64_t seed, int j_one_based, bool symmetric) {
    if (n < 1 || T < 1) throw ConfigError("need n >= 1 and T >= 1");
    if (s < 1 || c < 1) throw ConfigError("need s >= 1 and c >= 1");
    if (gamma < 2) throw ConfigError("label alphabet needs gamma >= 2");
    if (z_s < 1 || z_q < 1) throw ConfigError("collusion bounds z_s and z_q must be at least 1");
    if (rho < 2 || rho > n) throw ConfigError("replication factor must satisfy 2 <= rho <= n");
    if ((rho + z_s - z_q) % 2 == 0)
        throw ConfigError("rho + z_s - z_q must be odd so the storage degree splits evenly");
    const int k_C = (rho - z_q + z_s + 1) / 2;
    if (k_C - z_s < 1)
        throw ConfigError("rho must be at least z_s + z_q + 1 to leave room for label symbols");
    if (j_one_based < 1 || j_one_based > T) throw ConfigError("queried objective j out of range");

    const uint64_t q_floor =
        std::max<uint64_t>(static_cast<uint64_t>(rho + k_C - z_s),
                           static_cast<uint64_t>(gamma - 1) * static_cast<uint64_t>(n) + 1);
    uint64_t q = next_prime_at_least(q_floor);
    if (q_override) {
        if (!is_prime(*q_override))
            throw ConfigError("q_override must be prime");
        if (*q_override < q_floor)
            throw ConfigError("q_override is below the minimum admissible modulus " +
                              std::to_string(q_floor));
        q = *q_override;
    }

    ProtocolConfig cfg;
    cfg.n = n;
    cfg.T = T;
    cfg.rho = rho;
    cfg.z_s = z_s;
    cfg.z_q = z_q;
    cfg.s = s;
    cfg.c = c;
    cfg.gamma = gamma;
    cfg.q = q;
    cfg.k_C = k_C;
    cfg.seed = seed;
    cfg.j = j_one_based - 1;
    cfg.symmetric = symmetric;
    return cfg;
}

namespace {

int64_t parse_int(const std::string& key, const std::string& text) {
    std::size_t pos = 0;
    int64_t v = 0;
    try {
        v = std::stoll(text, &pos);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "' has a non-integer value '" + text + "'");
    }
    if (pos != text.size())
        throw ConfigError("key '" + key + "' has a non-integer value '" + text + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "0" || text == "false") return false;
    if (text == "1" || text == "true") return true;
    throw ConfigError("key '" + key + "' must be 0/1/true/false");
}

std::string trim(const std::string& in) {
    std::size_t b = in.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = in.find_last_not_of(" \t\r");
    return in.substr(b, e - b + 1);
}

} // namespace

ParsedConfig parse_config(std::istream& in) {
    static const std::vector<std::string> known{
        "n", "T", "rho", "z_s", "z_q", "s", "c", "gamma", "j", "seed",
        "symmetric", "q_override", "assignment_file", "labels_file"};
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + " is not key=value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown config key '" + key + "'");
        if (!kv.emplace(key, value).second)
            throw ConfigError("config key '" + key + "' appears twice");
        if (value.empty())
            throw ConfigError("config key '" + key + "' has an empty value");
    }
    for (const char* req : {"n", "T", "rho", "z_s", "z_q", "s", "c", "gamma"}) {
        if (!kv.count(req)) throw ConfigError(std::string("config key '") + req + "' is required");
    }
    auto get_int = [&](const char* key, int64_t fallback) {
        auto it = kv.find(key);
        return it == kv.end() ? fallback : parse_int(key, it->second);
    };
    std::optional<uint64_t> q_override;
    if (kv.count("q_override")) {
        int64_t v = parse_int("q_override", kv.at("q_override"));
        if (v < 2) throw ConfigError("q_override must be at least 2");
        q_override = static_cast<uint64_t>(v);
    }
    const int64_t gamma = get_int("gamma", 2);
    if (gamma < 2 || gamma > UINT32_MAX) throw ConfigError("gamma out of range");
    const int64_t seed = get_int("seed", 0);
    const bool symmetric = kv.count("symmetric") ? parse_bool("symmetric", kv.at("symmetric")) : false;

    ParsedConfig out;
    out.cfg = derive_params(static_cast<int>(get_int("n", 0)), static_cast<int>(get_int("T", 0)),
                            static_cast<int>(get_int("rho", 0)), static_cast<int>(get_int("z_s", 0)),
                            static_cast<int>(get_int("z_q", 0)), static_cast<int>(get_int("s", 0)),
                            static_cast<int>(get_int("c", 0)), static_cast<uint32_t>(gamma),
                            q_override, static_cast<uint64_t>(seed),
                            static_cast<int>(get_int("j", 1)), symmetric);
    if (kv.count("assignment_file")) out.assignment_file = kv.at("assignment_file");
    if (kv.count("labels_file")) out.labels_file = kv.at("labels_file");
    return out;
}

void write_transcript_csv(const Transcript& tr, std::ostream& out) {
    out << "stage,src,dst,objective,partition,symbols\n";
    for (const TranscriptRow& row : tr) {
        out << row.stage << ',' << row.src << ',' << row.dst << ',' << row.objective << ','
            << row.partition << ',' << row.symbols << '\n';
    }
}

uint64_t DualTable::at(int t, int i) const {
    auto it = nu.find({t, i});
    if (it == nu.end()) throw std::out_of_range("no dual coefficient for this (objective, client)");
    return it->second;
}

DualTable build_dual_table(const TaskAssignment& a, const std::vector<uint64_t>& pts,
                           const PrimeField& f) {
    DualTable table;
    for (int t = 0; t < a.T; ++t) {
        const std::vector<int> members = a.incident_clients(t);
        const std::vector<uint64_t> nu = dual_coefficients(members, pts, f);
        for (std::size_t m = 0; m < members.size(); ++m) table.nu[{t, members[m]}] = nu[m];
    }
    if (a.n >= 2) {
        std::vector<int> everyone(a.n);
        for (int i = 0; i < a.n; ++i) everyone[i] = i;
        table.full = dual_coefficients(everyone, pts, f);
    } else {
        table.full.assign(1, 1);
    }
    return table;
}

const std::vector<uint64_t>& QueryRandomness::at(int t, int p) const {
    auto it = k.find({t, p});
    if (it == k.end()) throw std::out_of_range("no query randomness for this (objective, partition)");
    return it->second;
}

QueryRandomness draw_query_randomness(uint64_t seed, int T, int P, int z_q, uint64_t q) {
    QueryRandomness rnd;
    rnd.z_q = z_q;
    for (int t = 0; t < T; ++t) {
        for (int p = 0; p < P; ++p) {
            auto& taus = rnd.k[{t, p}];
            taus.assign(static_cast<std::size_t>(z_q), 0);
            for (int tau = 0; tau < z_q; ++tau) {
                std::mt19937_64 g(stream_seed(seed, kQueryPurpose, static_cast<uint64_t>(t),
                                              static_cast<uint64_t>(p), static_cast<uint64_t>(tau)));
                taus[tau] = uniform_below(g, q);
            }
        }
    }
    return rnd;
}

QueryRandomness zero_query_randomness(int T, int P, int z_q) {
    QueryRandomness rnd;
    rnd.z_q = z_q;
    for (int t = 0; t < T; ++t)
        for (int p = 0; p < P; ++p) rnd.k[{t, p}].assign(static_cast<std::size_t>(z_q), 0);
    return rnd;
}

uint64_t QueryBatch::at(int i, int t, int p) const {
    auto it = values.find({i, t, p});
    if (it == values.end()) throw std::out_of_range("no query value for this (client, objective, partition)");
    return it->second;
}

QueryBatch build_queries(const ProtocolConfig& cfg, const TaskAssignment& a, const PrimeField& f,
                         const std::vector<uint64_t>& pts, int j, const QueryRandomness& rnd,
                         CostLedger* ledger, Transcript* transcript) {
    if (j < 0 || j >= cfg.T) throw ConfigError("queried objective out of range");
    const int w = cfg.width();
    QueryBatch batch;
    for (int t = 0; t < cfg.T; ++t) {
        for (int p = 0; p < cfg.partitions(); ++p) {
            const std::vector<uint64_t>& taus = rnd.at(t, p);
            if (static_cast<int>(taus.size()) != cfg.z_q)
                throw std::invalid_argument("query randomness width mismatch");
            for (int i : a.incident_clients(t)) {
                uint64_t value = (t == j) ? 1 : 0;
                for (int tau = 0; tau < cfg.z_q; ++tau) {
                    const uint64_t monomial =
                        f.pow(pts[i], static_cast<uint64_t>(w + tau));
                    value = f.add(value, f.mul(taus[tau] % f.q(), monomial));
                }
                batch.values[{i, t, p}] = value;
                if (ledger) ledger->query_symbols += 1;
                if (transcript)
                    transcript->push_back({"query", 0, i + 1, t + 1, p + 1, 1});
            }
        }
    }
    return batch;
}

const std::vector<uint64_t>& SharedMask::at(int p) const {
    auto it = coeffs.find(p);
    if (it == coeffs.end()) throw std::out_of_range("no mask for this partition");
    return it->second;
}

SharedMask draw_shared_mask(uint64_t seed, const ProtocolConfig& cfg) {
    SharedMask mask;
    for (int p = 0; p < cfg.partitions(); ++p) {
        auto& taus = mask.coeffs[p];
        taus.assign(static_cast<std::size_t>(cfg.interference_terms()), 0);
        for (int tau = 0; tau < cfg.interference_terms(); ++tau) {
            std::mt19937_64 g(stream_seed(seed, kMaskPurpose, static_cast<uint64_t>(p),
                                          static_cast<uint64_t>(tau)));
            taus[tau] = uniform_below(g, cfg.q);
        }
    }
    return mask;
}

SharedMask zero_shared_mask(const ProtocolConfig& cfg) {
    SharedMask mask;
    for (int p = 0; p < cfg.partitions(); ++p)
        mask.coeffs[p].assign(static_cast<std::size_t>(cfg.interference_terms()), 0);
    return mask;
}

SharingStageResult run_sharing_stage(const ProtocolConfig& cfg, const TaskAssignment& a,
                                     const PrimeField& f, const std::vector<uint64_t>& pts,
                                     const PartitionedLabels& pl, const ShareRandomness& rnd,
                                     CostLedger* ledger, Transcript* transcript) {
    SharingStageResult result;
    result.batch = encode_shares(pl, a, f, pts, rnd);
    result.storage = aggregate_shares(result.batch, a, f);
    for (int t = 0; t < a.T; ++t) {
        const std::vector<int> members = a.incident_clients(t);
        for (int p = 0; p < pl.count; ++p) {
            for (int src : members) {
                for (int dst : members) {
                    if (src == dst) continue; // kept locally, never transmitted
                    if (ledger) ledger->sharing_symbols += 1;
                    if (transcript)
                        transcript->push_back({"share", src + 1, dst + 1, t + 1, p + 1, 1});
                }
            }
        }
    }
    return result;
}

std::vector<uint64_t> client_answer(int i, const ProtocolConfig& cfg, const TaskAssignment& a,
                                    const PrimeField& f, const StorageState& st,
                                    const QueryBatch& queries, const DualTable& duals) {
    std::vector<uint64_t> out(static_cast<std::size_t>(cfg.partitions()), 0);
    for (int t : a.incident_objectives(i)) {
        const uint64_t nu = duals.at(t, i);
        for (int p = 0; p < cfg.partitions(); ++p) {
            const uint64_t term = f.mul(nu, f.mul(st.at(i, t, p), queries.at(i, t, p)));
            out[p] = f.add(out[p], term);
        }
    }
    return out;
}

std::vector<uint64_t> client_answer_symmetric(int i, const ProtocolConfig& cfg,
                                              const TaskAssignment& a, const PrimeField& f,
                                              const std::vector<uint64_t>& pts,
                                              const StorageState& st, const QueryBatch& queries,
                                              const DualTable& duals, const SharedMask& mask) {
    std::vector<uint64_t> out = client_answer(i, cfg, a, f, st, queries, duals);
    const int w = cfg.width();
    for (int p = 0; p < cfg.partitions(); ++p) {
        const std::vector<uint64_t>& taus = mask.at(p);
        uint64_t masked = 0;
        for (std::size_t tau = 0; tau < taus.size(); ++tau) {
            masked = f.add(masked, f.mul(taus[tau] % f.q(),
                                         f.pow(pts[i], static_cast<uint64_t>(w) + tau)));
        }
        out[p] = f.add(out[p], f.mul(duals.full.at(static_cast<std::size_t>(i)), masked));
    }
    return out;
}

uint64_t AnswerBatch::at(int i, int p) const {
    auto it = values.find({i, p});
    if (it == values.end()) throw std::out_of_range("no answer for this (client, partition)");
    return it->second;
}

AnswerBatch collect_answers(const ProtocolConfig& cfg, const TaskAssignment& a,
                            const PrimeField& f, const std::vector<uint64_t>& pts,
                            const StorageState& st, const QueryBatch& queries,
                            const DualTable& duals, const SharedMask* mask,
                            CostLedger* ledger, Transcript* transcript) {
    AnswerBatch batch;
    for (int i = 0; i < cfg.n; ++i) {
        const std::vector<uint64_t> per_p =
            mask ? client_answer_symmetric(i, cfg, a, f, pts, st, queries, duals, *mask)
                 : client_answer(i, cfg, a, f, st, queries, duals);
        for (int p = 0; p < cfg.partitions(); ++p) batch.values[{i, p}] = per_p[p];
    }
    for (int p = 0; p < cfg.partitions(); ++p) {
        for (int i = 0; i < cfg.n; ++i) {
            if (ledger) ledger->answer_symbols += 1;
            if (transcript) transcript->push_back({"answer", i + 1, 0, 0, p + 1, 1});
        }
    }
    return batch;
}

std::vector<uint64_t> solve_lower_triangular(const std::vector<std::vector<uint64_t>>& m,
                                             const std::vector<uint64_t>& rhs,
                                             const PrimeField& f) {
    const std::size_t w = rhs.size();
    if (m.size() != w) throw std::invalid_argument("triangular system shape mismatch");
    std::vector<uint64_t> x(w, 0);
    for (std::size_t row = 0; row < w; ++row) {
        if (m[row].size() < row + 1) throw std::invalid_argument("triangular system shape mismatch");
        uint64_t acc = rhs[row];
        for (std::size_t col = 0; col < row; ++col) {
            acc = f.sub(acc, f.mul(m[row][col], x[col]));
        }
        const uint64_t diag = m[row][row];
        if (diag == 0)
            throw ProtocolError("reconstruction matrix is singular: zero diagonal at row " +
                                std::to_string(row + 1));
        x[row] = f.mul(acc, f.inv(diag));
    }
    return x;
}

std::vector<std::vector<uint64_t>> reconstruct(const AnswerBatch& answers,
                                               const ProtocolConfig& cfg,
                                               const TaskAssignment& a, const PrimeField& f,
                                               const std::vector<uint64_t>& pts, int j,
                                               const DualTable& duals) {
    const int w = cfg.width();
    const std::vector<int> members = a.incident_clients(j);

    // recon_matrix[theta-1][u-1] = sum over the queried storage set of
    // nu * alpha^(u-theta-1); lower triangular, constant diagonal.
    std::vector<std::vector<uint64_t>> recon_matrix(static_cast<std::size_t>(w));
    for (int theta = 1; theta <= w; ++theta) {
        auto& row = recon_matrix[theta - 1];
        row.assign(static_cast<std::size_t>(theta), 0);
        for (int u = 1; u <= theta; ++u) {
            uint64_t sum = 0;
            for (int i : members) {
                const uint64_t weight = f.pow_signed(pts[i], static_cast<int64_t>(u) - theta - 1);
                sum = f.add(sum, f.mul(duals.at(j, i), weight));
            }
            row[u - 1] = sum;
        }
    }

    std::vector<std::vector<uint64_t>> blocks;
    blocks.reserve(static_cast<std::size_t>(cfg.partitions()));
    for (int p = 0; p < cfg.partitions(); ++p) {
        std::vector<uint64_t> sigma(static_cast<std::size_t>(w), 0);
        for (int theta = 1; theta <= w; ++theta) {
            uint64_t sum = 0;
            for (int i = 0; i < cfg.n; ++i) {
                const uint64_t weight = f.pow_signed(pts[i], -static_cast<int64_t>(theta));
                sum = f.add(sum, f.mul(weight, answers.at(i, p)));
            }
            sigma[theta - 1] = sum;
        }
        blocks.push_back(solve_lower_triangular(recon_matrix, sigma, f));
    }
    return blocks;
}

RunResult run_end_to_end(const ProtocolConfig& cfg, const TaskAssignment& a,
                         const LabelSet& labels) {
    if (a.n != cfg.n || a.T != cfg.T || a.rho != cfg.rho)
        throw ConfigError("assignment dimensions do not match the configuration");
    {
        const ValidationReport rep = validate_assignment(a);
        if (!rep.ok()) throw ConfigError("assignment invalid: " + rep.errors.front());
    }
    if (labels.s != cfg.s || labels.c != cfg.c)
        throw ConfigError("label dimensions do not match the configuration");
    if (labels.gamma > cfg.gamma)
        throw ConfigError("label alphabet exceeds the configured gamma");

    const PrimeField f(cfg.q);
    const std::vector<uint64_t> pts = f.eval_points(static_cast<std::size_t>(cfg.n));
    const PartitionedLabels pl = partition(labels, cfg.k_C, cfg.z_s);

    RunResult result;
    const ShareRandomness share_rnd =
        draw_share_randomness(cfg.seed, a, pl.count, cfg.z_s, cfg.q);
    const SharingStageResult stage1 =
        run_sharing_stage(cfg, a, f, pts, pl, share_rnd, &result.ledger, &result.transcript);

    const QueryRandomness query_rnd =
        draw_query_randomness(cfg.seed, cfg.T, pl.count, cfg.z_q, cfg.q);
    const QueryBatch queries =
        build_queries(cfg, a, f, pts, cfg.j, query_rnd, &result.ledger, &result.transcript);

    const DualTable duals = build_dual_table(a, pts, f);
    SharedMask mask;
    if (cfg.symmetric) mask = draw_shared_mask(cfg.seed, cfg);
    const AnswerBatch answers =
        collect_answers(cfg, a, f, pts, stage1.storage, queries, duals,
                        cfg.symmetric ? &mask : nullptr, &result.ledger, &result.transcript);

    const std::vector<std::vector<uint64_t>> blocks =
        reconstruct(answers, cfg, a, f, pts, cfg.j, duals);

    result.sums.assign(static_cast<std::size_t>(cfg.s),
                       std::vector<uint64_t>(static_cast<std::size_t>(cfg.c), 0));
    for (int idx = 0; idx < cfg.s * cfg.c; ++idx) {
        const uint64_t v = blocks[static_cast<std::size_t>(idx / cfg.width())]
                                 [static_cast<std::size_t>(idx % cfg.width())];
        result.sums[static_cast<std::size_t>(idx / cfg.c)][static_cast<std::size_t>(idx % cfg.c)] = v;
    }
    return result;
}

} // namespace fedpir
