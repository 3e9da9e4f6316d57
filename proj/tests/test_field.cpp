#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fedpir/field.hpp"

#include <set>

using namespace fedpir;

namespace {

// Reference inverse: scan for b with a*b = 1 (mod q).
uint64_t brute_inverse(uint64_t a, uint64_t q) {
    for (uint64_t b = 1; b < q; ++b) {
        if ((a * b) % q == 1) return b;
    }
    return 0;
}

// Reference multiplicative order.
uint64_t brute_order(uint64_t g, uint64_t q) {
    uint64_t acc = g % q, ord = 1;
    while (acc != 1) {
        acc = (acc * g) % q;
        ++ord;
    }
    return ord;
}

// Reference smallest generator: first g whose order is q-1.
uint64_t brute_generator(uint64_t q) {
    if (q == 2) return 1;
    for (uint64_t g = 2; g < q; ++g) {
        if (brute_order(g, q) == q - 1) return g;
    }
    return 0;
}

std::vector<uint64_t> primes_up_to(uint64_t lim) {
    std::vector<uint64_t> out;
    for (uint64_t m = 2; m <= lim; ++m) {
        if (is_prime(m)) out.push_back(m);
    }
    return out;
}

} // namespace

TEST_CASE("primality test agrees with trial division on small integers") {
    auto brute_prime = [](uint64_t m) {
        if (m < 2) return false;
        for (uint64_t d = 2; d < m; ++d)
            if (m % d == 0) return false;
        return true;
    };
    for (uint64_t m = 0; m <= 500; ++m) {
        CHECK_EQ(is_prime(m), brute_prime(m));
    }
}

TEST_CASE("next_prime_at_least returns the first prime at or above the bound") {
    CHECK_EQ(next_prime_at_least(0), 2);
    CHECK_EQ(next_prime_at_least(2), 2);
    CHECK_EQ(next_prime_at_least(3), 3);
    CHECK_EQ(next_prime_at_least(4), 5);
    CHECK_EQ(next_prime_at_least(8), 11);
    CHECK_EQ(next_prime_at_least(11), 11);
    CHECK_EQ(next_prime_at_least(14), 17);
    CHECK_EQ(next_prime_at_least(90), 97);
    for (uint64_t m = 2; m <= 300; ++m) {
        uint64_t p = next_prime_at_least(m);
        CHECK(p >= m);
        CHECK(is_prime(p));
        for (uint64_t c = m; c < p; ++c) CHECK_FALSE(is_prime(c));
    }
}

TEST_CASE("constructing a field with a composite modulus is rejected") {
    CHECK_THROWS_AS(PrimeField(1), std::invalid_argument);
    CHECK_THROWS_AS(PrimeField(9), std::invalid_argument);
    CHECK_THROWS_AS(PrimeField(100), std::invalid_argument);
}

TEST_CASE("known inverses in small fields") {
    PrimeField f5(5);
    CHECK_EQ(f5.inv(2), 3);
    PrimeField f11(11);
    CHECK_EQ(f11.inv(4), 3);
}

TEST_CASE("inverse of zero is rejected") {
    PrimeField f(7);
    CHECK_THROWS_AS(f.inv(0), std::invalid_argument);
}

TEST_CASE("modular inverse matches brute force for every prime up to 101") {
    for (uint64_t q : primes_up_to(101)) {
        PrimeField f(q);
        for (uint64_t a = 1; a < q; ++a) {
            uint64_t b = f.inv(a);
            CHECK_EQ(b, brute_inverse(a, q));
            CHECK_EQ(f.mul(a, b), 1);
        }
    }
}

TEST_CASE("field axioms hold exhaustively in GF(7)") {
    PrimeField f(7);
    for (uint64_t a = 0; a < 7; ++a) {
        CHECK_EQ(f.add(a, 0), a);
        CHECK_EQ(f.mul(a, 1), a);
        CHECK_EQ(f.add(a, f.neg(a)), 0);
        for (uint64_t b = 0; b < 7; ++b) {
            CHECK_EQ(f.add(a, b), f.add(b, a));
            CHECK_EQ(f.mul(a, b), f.mul(b, a));
            CHECK_EQ(f.sub(a, b), f.add(a, f.neg(b)));
            for (uint64_t c = 0; c < 7; ++c) {
                CHECK_EQ(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                CHECK_EQ(f.add(a, f.add(b, c)), f.add(f.add(a, b), c));
                CHECK_EQ(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
            }
        }
    }
}

TEST_CASE("pow agrees with repeated multiplication") {
    PrimeField f(13);
    for (uint64_t a = 0; a < 13; ++a) {
        uint64_t acc = 1;
        for (uint64_t e = 0; e <= 20; ++e) {
            CHECK_EQ(f.pow(a, e), acc);
            acc = f.mul(acc, a);
        }
    }
    CHECK_EQ(f.pow(0, 0), 1);
}

TEST_CASE("negative exponents invert the base") {
    PrimeField f(11);
    for (uint64_t a = 1; a < 11; ++a) {
        for (int64_t e = -10; e <= 10; ++e) {
            uint64_t expect = f.pow(f.inv(a), static_cast<uint64_t>(e < 0 ? -e : 0));
            if (e >= 0) expect = f.pow(a, static_cast<uint64_t>(e));
            CHECK_EQ(f.pow_signed(a, e), expect);
            CHECK_EQ(f.mul(f.pow_signed(a, e), f.pow_signed(a, -e)), 1);
        }
    }
}

TEST_CASE("smallest generator in tiny fields") {
    CHECK_EQ(PrimeField(2).generator(), 1);
    CHECK_EQ(PrimeField(5).generator(), 2);
    CHECK_EQ(PrimeField(7).generator(), 3);
}

TEST_CASE("generator search matches brute-force order computation up to 101") {
    for (uint64_t q : primes_up_to(101)) {
        PrimeField f(q);
        CHECK_EQ(f.generator(), brute_generator(q));
        if (q > 2) {
            CHECK_EQ(brute_order(f.generator(), q), q - 1);
        }
    }
}

TEST_CASE("evaluation points are successive generator powers, distinct and nonzero") {
    PrimeField f5(5);
    std::vector<uint64_t> expect{2, 4, 3, 1};
    CHECK_EQ(f5.eval_points(4), expect);

    for (uint64_t q : {5ull, 7ull, 11ull, 13ull, 101ull}) {
        PrimeField f(q);
        auto pts = f.eval_points(q - 1);
        std::set<uint64_t> seen(pts.begin(), pts.end());
        CHECK_EQ(seen.size(), q - 1);
        CHECK_EQ(seen.count(0), 0);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            CHECK_EQ(pts[i], f.pow(f.generator(), i + 1));
        }
    }
}

TEST_CASE("too many evaluation points is rejected") {
    PrimeField f(5);
    CHECK_THROWS_AS(f.eval_points(5), std::invalid_argument);
    CHECK_NOTHROW(f.eval_points(4));
}

TEST_CASE("element arithmetic carries the field and rejects mismatches") {
    PrimeField f7(7), f11(11);
    FieldElement a(3, f7), b(6, f7), c(3, f11);
    CHECK_EQ((a + b).value, 2);
    CHECK_EQ((a - b).value, 4);
    CHECK_EQ((a * b).value, 4);
    CHECK_EQ((b / a).value, 2);
    CHECK_EQ(inv(a).value, 5);
    CHECK_EQ(pow(a, -1).value, 5);
    CHECK(a == FieldElement(10, f7));
    CHECK_THROWS_AS(a + c, std::invalid_argument);
    CHECK_THROWS_AS(a * c, std::invalid_argument);
    CHECK_THROWS_AS((void)(a == c), std::invalid_argument);
    CHECK_EQ(find_generator(f7).value, 3);
}
