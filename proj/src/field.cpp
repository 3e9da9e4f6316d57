#include "fedpir/field.hpp"

namespace fedpir {

bool is_prime(uint64_t m) {
    if (m < 2) return false;
    if (m % 2 == 0) return m == 2;
    if (m % 3 == 0) return m == 3;
    for (uint64_t d = 5; d * d <= m; d += 6) {
        if (m % d == 0 || m % (d + 2) == 0) return false;
    }
    return true;
}

uint64_t next_prime_at_least(uint64_t m) {
    if (m <= 2) return 2;
    uint64_t c = m | 1; // skip evens
    while (!is_prime(c)) c += 2;
    return c;
}

namespace {

// Prime factors of m, each listed once.
std::vector<uint64_t> distinct_prime_factors(uint64_t m) {
    std::vector<uint64_t> out;
    for (uint64_t d = 2; d * d <= m; ++d) {
        if (m % d == 0) {
            out.push_back(d);
            while (m % d == 0) m /= d;
        }
    }
    if (m > 1) out.push_back(m);
    return out;
}

uint64_t smallest_generator(uint64_t q) {
    if (q == 2) return 1;
    const uint64_t order = q - 1;
    const std::vector<uint64_t> factors = distinct_prime_factors(order);
    auto power = [q](uint64_t a, uint64_t e) {
        __uint128_t acc = 1, base = a % q;
        while (e) {
            if (e & 1) acc = (acc * base) % q;
            base = (base * base) % q;
            e >>= 1;
        }
        return static_cast<uint64_t>(acc);
    };
    for (uint64_t g = 2; g < q; ++g) {
        bool ok = true;
        for (uint64_t p : factors) {
            if (power(g, order / p) == 1) { ok = false; break; }
        }
        if (ok) return g;
    }
    throw std::logic_error("no generator found; modulus is not prime");
}

} // namespace

PrimeField::PrimeField(uint64_t q) : q_(q) {
    if (!is_prime(q)) throw std::invalid_argument("field modulus must be prime");
    generator_ = smallest_generator(q);
}

uint64_t PrimeField::inv(uint64_t a) const {
    a %= q_;
    if (a == 0) throw std::invalid_argument("inverse of zero");
    // extended Euclid on (a, q); q prime so gcd is 1
    int64_t t = 0, new_t = 1;
    int64_t r = static_cast<int64_t>(q_), new_r = static_cast<int64_t>(a);
    while (new_r != 0) {
        int64_t quot = r / new_r;
        int64_t tmp = t - quot * new_t;
        t = new_t; new_t = tmp;
        tmp = r - quot * new_r;
        r = new_r; new_r = tmp;
    }
    if (t < 0) t += static_cast<int64_t>(q_);
    return static_cast<uint64_t>(t);
}

uint64_t PrimeField::pow(uint64_t a, uint64_t e) const {
    uint64_t acc = 1 % q_;
    uint64_t base = a % q_;
    while (e) {
        if (e & 1) acc = mul(acc, base);
        base = mul(base, base);
        e >>= 1;
    }
    return acc;
}

uint64_t PrimeField::pow_signed(uint64_t a, int64_t e) const {
    if (e >= 0) return pow(a, static_cast<uint64_t>(e));
    return pow(inv(a), static_cast<uint64_t>(-e));
}

std::vector<uint64_t> PrimeField::eval_points(std::size_t n) const {
    if (n >= q_) throw std::invalid_argument("need n <= q-1 distinct nonzero points");
    std::vector<uint64_t> pts(n);
    uint64_t cur = 1;
    for (std::size_t i = 0; i < n; ++i) {
        cur = mul(cur, generator_);
        pts[i] = cur;
    }
    return pts;
}

namespace {
const PrimeField& same_field(FieldElement a, FieldElement b) {
    if (a.field == nullptr || b.field == nullptr || *a.field != *b.field)
        throw std::invalid_argument("field mismatch");
    return *a.field;
}
} // namespace

FieldElement operator+(FieldElement a, FieldElement b) {
    const PrimeField& f = same_field(a, b);
    return FieldElement(f.add(a.value, b.value), f);
}

FieldElement operator-(FieldElement a, FieldElement b) {
    const PrimeField& f = same_field(a, b);
    return FieldElement(f.sub(a.value, b.value), f);
}

FieldElement operator*(FieldElement a, FieldElement b) {
    const PrimeField& f = same_field(a, b);
    return FieldElement(f.mul(a.value, b.value), f);
}

FieldElement operator/(FieldElement a, FieldElement b) {
    const PrimeField& f = same_field(a, b);
    return FieldElement(f.mul(a.value, f.inv(b.value)), f);
}

bool operator==(FieldElement a, FieldElement b) {
    const PrimeField& f = same_field(a, b);
    (void)f;
    return a.value == b.value;
}

FieldElement inv(FieldElement a) {
    if (a.field == nullptr) throw std::invalid_argument("element has no field");
    return FieldElement(a.field->inv(a.value), *a.field);
}

FieldElement pow(FieldElement a, int64_t e) {
    if (a.field == nullptr) throw std::invalid_argument("element has no field");
    return FieldElement(a.field->pow_signed(a.value, e), *a.field);
}

FieldElement find_generator(const PrimeField& f) {
    return FieldElement(f.generator(), f);
}

} // namespace fedpir
