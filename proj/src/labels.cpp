#include "fedpir/labels.hpp"

#include "fedpir/errors.hpp"
#include "fedpir/rng.hpp"

#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace fedpir {

namespace {
constexpr uint64_t kLabelPurpose = 0x4c41424c; // stream tag for label synthesis
}

const std::vector<uint32_t>& LabelSet::stream(int i, int t) const {
    auto it = y.find({i, t});
    if (it == y.end()) throw std::out_of_range("no labels for this (client, objective) pair");
    return it->second;
}

LabelSet synth_labels(uint64_t seed, const TaskAssignment& a, int s, int c,
                      uint32_t gamma, LabelMode mode) {
    if (s < 1 || c < 1) throw ConfigError("labels need s >= 1 and c >= 1");
    if (gamma < 2) throw ConfigError("label alphabet needs gamma >= 2");
    LabelSet ls;
    ls.s = s;
    ls.c = c;
    ls.gamma = gamma;
    for (int i = 0; i < a.n; ++i) {
        for (int t : a.incident_objectives(i)) {
            std::mt19937_64 rng(stream_seed(seed, kLabelPurpose, static_cast<uint64_t>(i),
                                            static_cast<uint64_t>(t)));
            std::vector<uint32_t> stream(static_cast<std::size_t>(s) * c, 0);
            switch (mode) {
            case LabelMode::Uniform:
                for (auto& v : stream) v = static_cast<uint32_t>(uniform_below(rng, gamma));
                break;
            case LabelMode::OneHot:
                for (int l = 0; l < s; ++l) {
                    const auto hot = static_cast<std::size_t>(uniform_below(rng, static_cast<uint64_t>(c)));
                    stream[static_cast<std::size_t>(l) * c + hot] = 1;
                }
                break;
            case LabelMode::Zero:
                break;
            }
            ls.y.emplace(std::make_pair(i, t), std::move(stream));
        }
    }
    return ls;
}

LabelSet import_labels(std::istream& in, const TaskAssignment& a, int s, int c, uint32_t gamma) {
    if (s < 1 || c < 1) throw ConfigError("labels need s >= 1 and c >= 1");
    if (gamma < 2) throw ConfigError("label alphabet needs gamma >= 2");
    LabelSet ls;
    ls.s = s;
    ls.c = c;
    ls.gamma = gamma;
    std::set<std::tuple<int, int, int>> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        int i1, t1, l1;
        if (!(row >> i1 >> t1 >> l1))
            throw ConfigError("label line " + std::to_string(lineno) + " needs 'i t l' prefix");
        const int i = i1 - 1, t = t1 - 1, l = l1 - 1;
        if (i < 0 || i >= a.n || t < 0 || t >= a.T || l < 0 || l >= s)
            throw ConfigError("label line " + std::to_string(lineno) + " has indices out of range");
        if (!a.incidence[i][t])
            throw ConfigError("label line " + std::to_string(lineno) +
                              " refers to a non-incident (client, objective) pair");
        if (!seen.insert({i, t, l}).second)
            throw ConfigError("label line " + std::to_string(lineno) + " repeats an (i, t, l) triple");
        auto& stream = ls.y[{i, t}];
        if (stream.empty()) stream.assign(static_cast<std::size_t>(s) * c, 0);
        for (int m = 0; m < c; ++m) {
            int64_t v;
            if (!(row >> v))
                throw ConfigError("label line " + std::to_string(lineno) + " is short of values");
            if (v < 0 || v >= static_cast<int64_t>(gamma))
                throw ConfigError("label line " + std::to_string(lineno) + " has a value outside [0, gamma)");
            stream[static_cast<std::size_t>(l) * c + m] = static_cast<uint32_t>(v);
        }
        std::string extra;
        if (row >> extra)
            throw ConfigError("label line " + std::to_string(lineno) + " has trailing tokens");
    }
    for (int i = 0; i < a.n; ++i) {
        for (int t : a.incident_objectives(i)) {
            for (int l = 0; l < s; ++l) {
                if (!seen.count({i, t, l}))
                    throw ConfigError("labels missing for client " + std::to_string(i + 1) +
                                      ", objective " + std::to_string(t + 1) + ", sample " +
                                      std::to_string(l + 1));
            }
        }
    }
    return ls;
}

void export_labels(const LabelSet& ls, const TaskAssignment& a, std::ostream& out) {
    for (int i = 0; i < a.n; ++i) {
        for (int t : a.incident_objectives(i)) {
            const auto& stream = ls.stream(i, t);
            for (int l = 0; l < ls.s; ++l) {
                out << (i + 1) << ' ' << (t + 1) << ' ' << (l + 1);
                for (int m = 0; m < ls.c; ++m)
                    out << ' ' << stream[static_cast<std::size_t>(l) * ls.c + m];
                out << '\n';
            }
        }
    }
}

const std::vector<uint32_t>& PartitionedLabels::block(int i, int t, int p) const {
    auto it = blocks.find({i, t});
    if (it == blocks.end()) throw std::out_of_range("no blocks for this (client, objective) pair");
    return it->second.at(static_cast<std::size_t>(p));
}

PartitionedLabels partition(const LabelSet& ls, int k_C, int z_s) {
    const int width = k_C - z_s;
    if (width < 1) throw ConfigError("partition width k_C - z_s must be at least 1");
    const int total = ls.s * ls.c;
    PartitionedLabels pl;
    pl.width = width;
    pl.count = (total + width - 1) / width;
    pl.pad = pl.count * width - total;
    for (const auto& [key, stream] : ls.y) {
        std::vector<std::vector<uint32_t>> blocks(
            static_cast<std::size_t>(pl.count), std::vector<uint32_t>(static_cast<std::size_t>(width), 0));
        for (int idx = 0; idx < total; ++idx) {
            blocks[static_cast<std::size_t>(idx / width)][static_cast<std::size_t>(idx % width)] = stream[idx];
        }
        pl.blocks.emplace(key, std::move(blocks));
    }
    return pl;
}

std::vector<uint32_t> departition(const PartitionedLabels& pl, int i, int t, int s, int c) {
    auto it = pl.blocks.find({i, t});
    if (it == pl.blocks.end()) throw std::out_of_range("no blocks for this (client, objective) pair");
    const int total = s * c;
    if (total + pl.pad != pl.count * pl.width)
        throw std::invalid_argument("s*c inconsistent with partition geometry");
    std::vector<uint32_t> stream(static_cast<std::size_t>(total));
    for (int idx = 0; idx < total; ++idx) {
        stream[idx] = it->second[static_cast<std::size_t>(idx / pl.width)][static_cast<std::size_t>(idx % pl.width)];
    }
    return stream;
}

} // namespace fedpir
