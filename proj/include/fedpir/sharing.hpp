#pragma once

#include "fedpir/assignment.hpp"
#include "fedpir/field.hpp"
#include "fedpir/labels.hpp"

#include <cstdint>
#include <map>
#include <tuple>
#include <vector>

namespace fedpir {

// Blinding coefficients for the ramp sharing, addressable as r[(i,t)][p][tau]
// with tau in [0, z_s). Kept explicit so tests and audits can pin exact
// values; the zero variant is the test hook that strips all blinding.
struct ShareRandomness {
    int z_s = 0;
    std::map<std::pair<int, int>, std::vector<std::vector<uint64_t>>> r;

    const std::vector<uint64_t>& at(int i, int t, int p) const;
};

ShareRandomness draw_share_randomness(uint64_t seed, const TaskAssignment& a,
                                      int P, int z_s, uint64_t q);
ShareRandomness zero_share_randomness(const TaskAssignment& a, int P, int z_s);

// One evaluation per (source, destination, objective, partition). Entries
// with src == dst are the shares clients keep for themselves; only the rest
// travel over the network.
struct ShareBatch {
    int P = 0;
    std::map<std::tuple<int, int, int, int>, uint64_t> values;

    uint64_t at(int src, int dst, int t, int p) const;
};

// For every objective t, every storing client encodes each of its label
// blocks as a polynomial (block symbols at degrees 0..width-1, blinding at
// degrees width..width+z_s-1) and evaluates it at every storing client's
// point.
ShareBatch encode_shares(const PartitionedLabels& pl, const TaskAssignment& a,
                         const PrimeField& f, const std::vector<uint64_t>& pts,
                         const ShareRandomness& rnd);

// Per-(client, objective, partition) sums of the received and kept shares.
// This is the only per-objective state a client stores after the first stage.
struct StorageState {
    std::map<std::tuple<int, int, int>, uint64_t> values;

    uint64_t at(int i, int t, int p) const;
};

StorageState aggregate_shares(const ShareBatch& batch, const TaskAssignment& a,
                              const PrimeField& f);

// Interpolates the unique polynomial through the given (point, share) pairs
// and returns its first `width` coefficients. Feeding it k_C aggregated
// shares of one (t, p) recovers that block of the summed labels.
std::vector<uint64_t> reconstruct_secret(const PrimeField& f,
                                         const std::vector<std::pair<uint64_t, uint64_t>>& shares,
                                         int width);

} // namespace fedpir
