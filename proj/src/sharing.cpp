#include "fedpir/sharing.hpp"

#include "fedpir/errors.hpp"
#include "fedpir/poly.hpp"
#include "fedpir/rng.hpp"

namespace fedpir {

namespace {
constexpr uint64_t kSharePurpose = 0x53484152; // stream tag for share blinding
}

const std::vector<uint64_t>& ShareRandomness::at(int i, int t, int p) const {
    auto it = r.find({i, t});
    if (it == r.end()) throw std::out_of_range("no share randomness for this (client, objective) pair");
    return it->second.at(static_cast<std::size_t>(p));
}

ShareRandomness draw_share_randomness(uint64_t seed, const TaskAssignment& a,
                                      int P, int z_s, uint64_t q) {
    ShareRandomness rnd;
    rnd.z_s = z_s;
    for (int t = 0; t < a.T; ++t) {
        for (int i : a.incident_clients(t)) {
            auto& per_partition = rnd.r[{i, t}];
            per_partition.assign(static_cast<std::size_t>(P), std::vector<uint64_t>(static_cast<std::size_t>(z_s), 0));
            for (int p = 0; p < P; ++p) {
                for (int tau = 0; tau < z_s; ++tau) {
                    std::mt19937_64 g(stream_seed(seed, kSharePurpose, static_cast<uint64_t>(i),
                                                  static_cast<uint64_t>(t), static_cast<uint64_t>(p),
                                                  static_cast<uint64_t>(tau)));
                    per_partition[p][tau] = uniform_below(g, q);
                }
            }
        }
    }
    return rnd;
}

ShareRandomness zero_share_randomness(const TaskAssignment& a, int P, int z_s) {
    ShareRandomness rnd;
    rnd.z_s = z_s;
    for (int t = 0; t < a.T; ++t) {
        for (int i : a.incident_clients(t)) {
            rnd.r[{i, t}].assign(static_cast<std::size_t>(P),
                                 std::vector<uint64_t>(static_cast<std::size_t>(z_s), 0));
        }
    }
    return rnd;
}

uint64_t ShareBatch::at(int src, int dst, int t, int p) const {
    auto it = values.find({src, dst, t, p});
    if (it == values.end()) throw std::out_of_range("no share for this (src, dst, t, p)");
    return it->second;
}

ShareBatch encode_shares(const PartitionedLabels& pl, const TaskAssignment& a,
                         const PrimeField& f, const std::vector<uint64_t>& pts,
                         const ShareRandomness& rnd) {
    if (pts.size() < static_cast<std::size_t>(a.n))
        throw std::invalid_argument("need one evaluation point per client");
    ShareBatch batch;
    batch.P = pl.count;
    for (int t = 0; t < a.T; ++t) {
        const std::vector<int> members = a.incident_clients(t);
        for (int src : members) {
            for (int p = 0; p < pl.count; ++p) {
                const std::vector<uint32_t>& block = pl.block(src, t, p);
                const std::vector<uint64_t>& blind = rnd.at(src, t, p);
                VecPolynomial poly = make_polynomial(f, 1, block.size() + blind.size());
                for (std::size_t u = 0; u < block.size(); ++u) poly.coeffs[u][0] = block[u] % f.q();
                for (std::size_t tau = 0; tau < blind.size(); ++tau)
                    poly.coeffs[block.size() + tau][0] = blind[tau] % f.q();
                for (int dst : members) {
                    batch.values[{src, dst, t, p}] = evaluate(poly, pts[dst])[0];
                }
            }
        }
    }
    return batch;
}

uint64_t StorageState::at(int i, int t, int p) const {
    auto it = values.find({i, t, p});
    if (it == values.end()) throw std::out_of_range("no storage for this (i, t, p)");
    return it->second;
}

StorageState aggregate_shares(const ShareBatch& batch, const TaskAssignment& a, const PrimeField& f) {
    (void)a;
    StorageState st;
    for (const auto& [key, value] : batch.values) {
        const auto& [src, dst, t, p] = key;
        (void)src;
        uint64_t& slot = st.values[{dst, t, p}];
        slot = f.add(slot, value);
    }
    return st;
}

std::vector<uint64_t> reconstruct_secret(const PrimeField& f,
                                         const std::vector<std::pair<uint64_t, uint64_t>>& shares,
                                         int width) {
    if (width < 1) throw std::invalid_argument("width must be positive");
    if (shares.size() < static_cast<std::size_t>(width))
        throw std::invalid_argument("need at least `width` shares to reconstruct");
    std::vector<std::pair<uint64_t, std::vector<uint64_t>>> pts;
    pts.reserve(shares.size());
    for (const auto& [x, y] : shares) pts.push_back({x, {y}});
    VecPolynomial poly = interpolate(f, pts);
    std::vector<uint64_t> out(static_cast<std::size_t>(width), 0);
    for (int u = 0; u < width; ++u) out[u] = poly.coeffs[static_cast<std::size_t>(u)][0];
    return out;
}

} // namespace fedpir
