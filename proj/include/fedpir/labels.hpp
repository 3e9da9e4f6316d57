#pragma once

#include "fedpir/assignment.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

namespace fedpir {

// Per-(client, objective) label block. The s per-sample label vectors of
// length c are flattened into one stream of s*c scalars, slot (l, m) at
// index l*c + m (sample l, class m, both 0-based). Values live in [0, gamma).
struct LabelSet {
    int s = 0;
    int c = 0;
    uint32_t gamma = 2;
    std::map<std::pair<int, int>, std::vector<uint32_t>> y; // (i,t) -> stream

    const std::vector<uint32_t>& stream(int i, int t) const;
};

enum class LabelMode {
    Uniform, // every slot uniform in [0, gamma)
    OneHot,  // per sample, one class set to 1, rest 0
    Zero,    // all slots 0
};

// Deterministic synthesis; the stream for each (i,t) depends only on
// (seed, i, t), not on iteration order.
LabelSet synth_labels(uint64_t seed, const TaskAssignment& a, int s, int c,
                      uint32_t gamma, LabelMode mode = LabelMode::Uniform);

// Text exchange format, one line per (i, t, l): "i t l v_1 ... v_c" with
// 1-based indices. Every incident (i,t) pair must be fully covered.
LabelSet import_labels(std::istream& in, const TaskAssignment& a, int s, int c, uint32_t gamma);
void export_labels(const LabelSet& ls, const TaskAssignment& a, std::ostream& out);

// Label streams chopped into P = ceil(s*c / width) blocks of `width`
// scalars, zero-padded at the tail. width = k_C - z_s.
struct PartitionedLabels {
    int width = 0;
    int count = 0; // number of partitions P
    int pad = 0;   // zero slots appended to the last block
    std::map<std::pair<int, int>, std::vector<std::vector<uint32_t>>> blocks;

    const std::vector<uint32_t>& block(int i, int t, int p) const;
};

PartitionedLabels partition(const LabelSet& ls, int k_C, int z_s);

// Re-assembles the stream for one (i,t) pair, dropping the padding.
std::vector<uint32_t> departition(const PartitionedLabels& pl, int i, int t, int s, int c);

} // namespace fedpir
