#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fedpir/errors.hpp"
#include "fedpir/labels.hpp"

#include <sstream>

using namespace fedpir;

TEST_CASE("synthesis is deterministic in the seed and covers exactly the incident pairs") {
    TaskAssignment a = build_cyclic_assignment(4, 3, 2);
    LabelSet x = synth_labels(42, a, 2, 3, 4);
    LabelSet y = synth_labels(42, a, 2, 3, 4);
    CHECK(x.y == y.y);
    LabelSet z = synth_labels(43, a, 2, 3, 4);
    CHECK(x.y != z.y);

    int pairs = 0;
    for (int i = 0; i < a.n; ++i) pairs += static_cast<int>(a.incident_objectives(i).size());
    CHECK_EQ(static_cast<int>(x.y.size()), pairs);
    for (const auto& [key, stream] : x.y) {
        CHECK(a.incidence[key.first][key.second]);
        CHECK_EQ(stream.size(), 6);
        for (uint32_t v : stream) CHECK(v < 4);
    }
    CHECK_THROWS_AS(x.stream(3, 0), std::out_of_range); // client 4 not in objective 1
}

TEST_CASE("per-pair streams do not depend on matrix iteration order") {
    TaskAssignment small = build_cyclic_assignment(4, 2, 2);
    TaskAssignment big = build_cyclic_assignment(4, 3, 2);
    LabelSet ls_small = synth_labels(7, small, 2, 2, 3);
    LabelSet ls_big = synth_labels(7, big, 2, 2, 3);
    CHECK_EQ(ls_small.stream(1, 1), ls_big.stream(1, 1));
}

TEST_CASE("one-hot mode emits exactly one 1 per sample") {
    TaskAssignment a = build_cyclic_assignment(5, 5, 3);
    LabelSet ls = synth_labels(9, a, 4, 6, 2, LabelMode::OneHot);
    for (const auto& [key, stream] : ls.y) {
        (void)key;
        for (int l = 0; l < 4; ++l) {
            int ones = 0;
            for (int m = 0; m < 6; ++m) {
                uint32_t v = stream[static_cast<std::size_t>(l) * 6 + m];
                CHECK(v <= 1);
                ones += static_cast<int>(v);
            }
            CHECK_EQ(ones, 1);
        }
    }
}

TEST_CASE("zero mode emits all zeros") {
    TaskAssignment a = build_cyclic_assignment(3, 2, 2);
    LabelSet ls = synth_labels(1, a, 2, 2, 5, LabelMode::Zero);
    for (const auto& [key, stream] : ls.y) {
        (void)key;
        for (uint32_t v : stream) CHECK_EQ(v, 0);
    }
}

TEST_CASE("synthesis rejects degenerate shapes") {
    TaskAssignment a = build_cyclic_assignment(3, 2, 2);
    CHECK_THROWS_AS(synth_labels(1, a, 0, 2, 2), ConfigError);
    CHECK_THROWS_AS(synth_labels(1, a, 2, 0, 2), ConfigError);
    CHECK_THROWS_AS(synth_labels(1, a, 2, 2, 1), ConfigError);
}

TEST_CASE("partition splits the stream into ceil(s*c/width) blocks with zero padding") {
    TaskAssignment a = build_cyclic_assignment(2, 1, 2);
    LabelSet ls;
    ls.s = 1;
    ls.c = 5;
    ls.gamma = 5;
    ls.y[{0, 0}] = {4, 1, 0, 3, 2};
    ls.y[{1, 0}] = {1, 1, 2, 0, 4};
    PartitionedLabels pl = partition(ls, 3, 1); // width 2
    CHECK_EQ(pl.width, 2);
    CHECK_EQ(pl.count, 3);
    CHECK_EQ(pl.pad, 1);
    CHECK_EQ(pl.block(0, 0, 0), std::vector<uint32_t>{4, 1});
    CHECK_EQ(pl.block(0, 0, 1), std::vector<uint32_t>{0, 3});
    CHECK_EQ(pl.block(0, 0, 2), std::vector<uint32_t>{2, 0});
    CHECK_EQ(departition(pl, 0, 0, 1, 5), ls.y[{0, 0}]);
    CHECK_EQ(departition(pl, 1, 0, 1, 5), ls.y[{1, 0}]);
}

TEST_CASE("partition with exact divisibility has no padding") {
    TaskAssignment a = build_cyclic_assignment(3, 1, 3);
    LabelSet ls = synth_labels(5, a, 2, 3, 2);
    PartitionedLabels pl = partition(ls, 4, 1); // width 3, s*c = 6
    CHECK_EQ(pl.count, 2);
    CHECK_EQ(pl.pad, 0);
    for (int i = 0; i < 3; ++i) CHECK_EQ(departition(pl, i, 0, 2, 3), ls.stream(i, 0));
}

TEST_CASE("partition rejects non-positive width") {
    LabelSet ls;
    ls.s = 1;
    ls.c = 2;
    ls.y[{0, 0}] = {0, 1};
    CHECK_THROWS_AS(partition(ls, 2, 2), ConfigError);
    CHECK_THROWS_AS(partition(ls, 1, 2), ConfigError);
}

TEST_CASE("label text round trip") {
    TaskAssignment a = build_cyclic_assignment(4, 3, 3);
    LabelSet ls = synth_labels(11, a, 3, 2, 6);
    std::ostringstream out;
    export_labels(ls, a, out);
    std::istringstream in(out.str());
    LabelSet back = import_labels(in, a, 3, 2, 6);
    CHECK(ls.y == back.y);
}

TEST_CASE("label import rejects malformed input") {
    TaskAssignment a = build_cyclic_assignment(3, 2, 2);
    auto import = [&](const std::string& text) {
        std::istringstream in(text);
        return import_labels(in, a, 1, 2, 3);
    };
    CHECK_THROWS_AS(import(""), ConfigError);                          // nothing covered
    CHECK_THROWS_AS(import("1 1\n"), ConfigError);                     // short prefix
    CHECK_THROWS_AS(import("3 1 1 0 0\n"), ConfigError);               // client 3 not incident to 1
    CHECK_THROWS_AS(import("1 1 1 0 3\n"), ConfigError);               // value >= gamma
    CHECK_THROWS_AS(import("1 1 1 0 1 7\n"), ConfigError);             // trailing token
    CHECK_THROWS_AS(import("1 1 1 0 1\n1 1 1 0 1\n"), ConfigError);    // duplicate triple
    // missing one pair: only (1,1) given, (2,1),(2,2),(3,2) absent
    CHECK_THROWS_AS(import("1 1 1 0 1\n"), ConfigError);
}
