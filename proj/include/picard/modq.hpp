#pragma once

#include <cstdint>
#include <vector>

#include "picard/arith.hpp"

namespace picard {

// Arithmetic modulo a word-sized prime q.
std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t q);

// Distinct roots in F_q of an integer polynomial (constant term first),
// by Cantor-Zassenhaus splitting of gcd(f, x^q - x).
std::vector<std::uint64_t> roots_mod_q(const std::vector<Int>& f, std::uint64_t q);

// Prime factors of n (distinct, increasing) by trial division.
std::vector<std::uint64_t> prime_factors_u64(std::uint64_t n);

std::uint64_t primitive_root(std::uint64_t q);

// Multiplicative order of x mod q.
std::uint64_t mult_order(std::uint64_t x, std::uint64_t q);

// Discrete logarithm of x to base g (a primitive root) modulo q, using
// Pohlig-Hellman with baby-step giant-step in each prime-power part.
std::uint64_t discrete_log(std::uint64_t x, std::uint64_t g, std::uint64_t q);

// Smith form D = U A V of an integer matrix; only U and the diagonal are
// returned. diag has min(rows, cols) entries, zeros last.
struct SmithForm {
  std::vector<std::vector<Int>> U;
  std::vector<Int> diag;
};
SmithForm smith_form(std::vector<std::vector<Int>> a);

}  // namespace picard
