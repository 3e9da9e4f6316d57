#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace fedpir {

// Deterministic primality check. Trial division is enough for the moduli
// this project uses (label alphabets and client counts keep q far below 2^32).
bool is_prime(uint64_t m);

// Smallest prime >= max(m, 2).
uint64_t next_prime_at_least(uint64_t m);

// Prime field F_q with a fixed canonical generator (smallest one).
// Elements are represented as uint64_t in [0, q). Arithmetic widens through
// __uint128_t so any q below 2^63 is safe; in practice q stays tiny.
class PrimeField {
public:
    explicit PrimeField(uint64_t q);

    uint64_t q() const { return q_; }
    uint64_t generator() const { return generator_; }

    uint64_t add(uint64_t a, uint64_t b) const { return (a + b) % q_; }
    uint64_t sub(uint64_t a, uint64_t b) const { return (a + q_ - b % q_) % q_; }
    uint64_t neg(uint64_t a) const { return (q_ - a % q_) % q_; }
    uint64_t mul(uint64_t a, uint64_t b) const {
        return static_cast<uint64_t>((static_cast<__uint128_t>(a) * b) % q_);
    }

    // Multiplicative inverse via extended Euclid. Throws std::invalid_argument on 0.
    uint64_t inv(uint64_t a) const;

    // a^e by square-and-multiply; 0^0 = 1 by convention.
    uint64_t pow(uint64_t a, uint64_t e) const;

    // Signed exponent: negative e inverts the base first.
    uint64_t pow_signed(uint64_t a, int64_t e) const;

    // Distinct nonzero evaluation points alpha^1 .. alpha^n.
    // Distinctness needs n <= q-1; otherwise throws std::invalid_argument.
    std::vector<uint64_t> eval_points(std::size_t n) const;

    bool operator==(const PrimeField& other) const { return q_ == other.q_; }
    bool operator!=(const PrimeField& other) const { return q_ != other.q_; }

private:
    uint64_t q_;
    uint64_t generator_;
};

// Value-with-field wrapper used by the algebra-facing APIs. Operations on
// elements of different fields throw std::invalid_argument.
struct FieldElement {
    uint64_t value = 0;
    const PrimeField* field = nullptr;

    FieldElement() = default;
    FieldElement(uint64_t v, const PrimeField& f) : value(v % f.q()), field(&f) {}
};

FieldElement operator+(FieldElement a, FieldElement b);
FieldElement operator-(FieldElement a, FieldElement b);
FieldElement operator*(FieldElement a, FieldElement b);
FieldElement operator/(FieldElement a, FieldElement b);
bool operator==(FieldElement a, FieldElement b);
FieldElement inv(FieldElement a);
FieldElement pow(FieldElement a, int64_t e);

// Smallest generator of F_q^* as an element (q=2 degenerates to 1).
FieldElement find_generator(const PrimeField& f);

} // namespace fedpir
