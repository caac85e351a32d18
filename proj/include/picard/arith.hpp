#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace picard {

using Int = mpz_class;
using Rat = mpq_class;

// 3-adic valuation; the argument must be nonzero.
int v3(const Int& x);
int v3(const Rat& x);

// x with every factor of 3 removed (sign kept).
Int strip3(const Int& x);

// True iff x = ±3^k for some integer k (k may be negative).
bool is_pm_power_of_3(const Rat& x);

// Nonzero x lies in Z[1/3].
bool is_3_integral(const Rat& x);

// Integer power 3^k as a rational, k of either sign.
Rat pow3(int k);

Int ipow(const Int& b, unsigned e);
Rat rpow(const Rat& b, int e);

// Exact integer k-th root if it exists.
std::optional<Int> exact_root(const Int& x, unsigned k);
bool is_rational_cube(const Rat& x);
std::optional<Rat> rational_cube_root(const Rat& x);

// Serialization as "num/den" (or "num" when den = 1).
std::string rat_to_string(const Rat& x);
Rat rat_from_string(const std::string& s);

// Prime factorization of |n|, n != 0, as (prime, exponent) pairs in
// increasing order. Trial division followed by Pollard rho.
std::vector<std::pair<Int, unsigned>> factor(const Int& n);

// All positive divisors of |n| in increasing order.
std::vector<Int> divisors(const Int& n);

bool is_prime_u64(std::uint64_t n);
std::uint64_t powmod_u64(std::uint64_t b, std::uint64_t e, std::uint64_t m);
std::uint64_t invmod_u64(std::uint64_t a, std::uint64_t m);
std::uint64_t mod_rat(const Rat& x, std::uint64_t q);  // q prime, den invertible

Int lcm(const Int& a, const Int& b);
std::int64_t floor_div(std::int64_t a, std::int64_t b);
std::int64_t pos_mod(std::int64_t a, std::int64_t m);

}  // namespace picard
