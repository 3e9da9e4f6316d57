#pragma once

#include "fedpir/assignment.hpp"
#include "fedpir/field.hpp"
#include "fedpir/labels.hpp"
#include "fedpir/sharing.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fedpir {

// Fully derived parameter set. k_C and q are computed, never supplied
// directly; q_override may only raise q to a larger admissible prime.
struct ProtocolConfig {
    int n = 0;
    int T = 0;
    int rho = 0;
    int z_s = 0;
    int z_q = 0;
    int s = 0;
    int c = 0;
    uint32_t gamma = 2;
    uint64_t q = 0;
    int k_C = 0;
    uint64_t seed = 0;
    int j = 0; // queried objective, 0-based
    bool symmetric = false;

    int width() const { return k_C - z_s; }                       // label symbols per block
    int partitions() const { return (s * c + width() - 1) / width(); }
    int interference_terms() const { return k_C + z_q - 1; }      // blocked answer degrees
};

// Validates the raw parameters and derives k_C and q:
//   k_C = (rho - z_q + z_s + 1) / 2   (rho + z_s - z_q must be odd)
//   q   = smallest prime >= max(rho + k_C - z_s, (gamma-1)*n + 1)
ProtocolConfig derive_params(int n, int T, int rho, int z_s, int z_q, int s, int c,
                             uint32_t gamma, std::optional<uint64_t> q_override = {},
                             uint64_t seed = 0, int j_one_based = 1, bool symmetric = false);

struct ParsedConfig {
    ProtocolConfig cfg;
    std::optional<std::string> assignment_file;
    std::optional<std::string> labels_file;
};

// key=value per line, '#' comments. Keys: n, T, rho, z_s, z_q, s, c, gamma,
// j, seed, symmetric, q_override, assignment_file, labels_file.
ParsedConfig parse_config(std::istream& in);

struct CostLedger {
    uint64_t sharing_symbols = 0;
    uint64_t query_symbols = 0;
    uint64_t answer_symbols = 0;
};

struct TranscriptRow {
    std::string stage; // "share", "query", "answer"
    int src = 0;       // 1-based client id, 0 = federator
    int dst = 0;
    int objective = 0; // 1-based, 0 where not applicable
    int partition = 0; // 1-based
    uint64_t symbols = 0;

    bool operator==(const TranscriptRow&) const = default;
};
using Transcript = std::vector<TranscriptRow>;

void write_transcript_csv(const Transcript& tr, std::ostream& out);

// nu[(t, i)] for every storing pair, plus the full-set weights used to mix
// the shared response mask so it cancels in reconstruction.
struct DualTable {
    std::map<std::pair<int, int>, uint64_t> nu; // (objective, client)
    std::vector<uint64_t> full;                 // per client, over all n points

    uint64_t at(int t, int i) const;
};

DualTable build_dual_table(const TaskAssignment& a, const std::vector<uint64_t>& pts,
                           const PrimeField& f);

// Query randomness k[(t,p)][tau], tau in [0, z_q).
struct QueryRandomness {
    int z_q = 0;
    std::map<std::pair<int, int>, std::vector<uint64_t>> k;

    const std::vector<uint64_t>& at(int t, int p) const;
};

QueryRandomness draw_query_randomness(uint64_t seed, int T, int P, int z_q, uint64_t q);
QueryRandomness zero_query_randomness(int T, int P, int z_q);

// Query polynomial evaluations delivered to the storing clients:
// Q_p^(t)(x) = [t == j] + sum_tau k_tau x^(width + tau), evaluated at alpha_i.
struct QueryBatch {
    std::map<std::tuple<int, int, int>, uint64_t> values; // (i, t, p)

    uint64_t at(int i, int t, int p) const;
};

QueryBatch build_queries(const ProtocolConfig& cfg, const TaskAssignment& a,
                         const PrimeField& f, const std::vector<uint64_t>& pts, int j,
                         const QueryRandomness& rnd, CostLedger* ledger = nullptr,
                         Transcript* transcript = nullptr);

// Response mask shared by all clients (withheld from the federator);
// coefficients sit exactly on the blocked answer degrees width..rho-1.
struct SharedMask {
    std::map<int, std::vector<uint64_t>> coeffs; // p -> k_C + z_q - 1 values

    const std::vector<uint64_t>& at(int p) const;
};

SharedMask draw_shared_mask(uint64_t seed, const ProtocolConfig& cfg);
SharedMask zero_shared_mask(const ProtocolConfig& cfg);

// Runs the sharing stage: encode, exchange, aggregate. The batch is the
// traffic, the storage is what clients keep.
struct SharingStageResult {
    ShareBatch batch;
    StorageState storage;
};

SharingStageResult run_sharing_stage(const ProtocolConfig& cfg, const TaskAssignment& a,
                                     const PrimeField& f, const std::vector<uint64_t>& pts,
                                     const PartitionedLabels& pl, const ShareRandomness& rnd,
                                     CostLedger* ledger = nullptr, Transcript* transcript = nullptr);

// One answer symbol per partition:
//   A_{p,i} = sum_{t in objectives of i} nu[(t,i)] * storage(i,t,p) * query(i,t,p)
// plus, in symmetric mode, full[i] * mask_p(alpha_i).
std::vector<uint64_t> client_answer(int i, const ProtocolConfig& cfg, const TaskAssignment& a,
                                    const PrimeField& f, const StorageState& st,
                                    const QueryBatch& queries, const DualTable& duals);

std::vector<uint64_t> client_answer_symmetric(int i, const ProtocolConfig& cfg,
                                              const TaskAssignment& a, const PrimeField& f,
                                              const std::vector<uint64_t>& pts,
                                              const StorageState& st, const QueryBatch& queries,
                                              const DualTable& duals, const SharedMask& mask);

struct AnswerBatch {
    std::map<std::pair<int, int>, uint64_t> values; // (i, p)

    uint64_t at(int i, int p) const;
};

AnswerBatch collect_answers(const ProtocolConfig& cfg, const TaskAssignment& a,
                            const PrimeField& f, const std::vector<uint64_t>& pts,
                            const StorageState& st, const QueryBatch& queries,
                            const DualTable& duals, const SharedMask* mask,
                            CostLedger* ledger = nullptr, Transcript* transcript = nullptr);

// Forward substitution for a lower-triangular system; raises ProtocolError
// if a diagonal entry vanishes.
std::vector<uint64_t> solve_lower_triangular(const std::vector<std::vector<uint64_t>>& m,
                                             const std::vector<uint64_t>& rhs,
                                             const PrimeField& f);

// Federator-side decoding: weighted power sums of all n answers, then the
// triangular system over the queried storage set. Returns one width-sized
// block of summed labels per partition.
std::vector<std::vector<uint64_t>> reconstruct(const AnswerBatch& answers,
                                               const ProtocolConfig& cfg,
                                               const TaskAssignment& a, const PrimeField& f,
                                               const std::vector<uint64_t>& pts, int j,
                                               const DualTable& duals);

struct RunResult {
    std::vector<std::vector<uint64_t>> sums; // s rows of c summed labels
    CostLedger ledger;
    Transcript transcript;
};

// Whole protocol on one configuration: partition, share, query, answer,
// reconstruct, de-partition. All randomness is derived from cfg.seed.
RunResult run_end_to_end(const ProtocolConfig& cfg, const TaskAssignment& a,
                         const LabelSet& labels);

} // namespace fedpir
