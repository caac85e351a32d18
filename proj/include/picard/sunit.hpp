#pragma once

#include <compare>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "picard/lattice.hpp"
#include "picard/nf.hpp"

namespace picard {

// An S-unit as rho_0^{a0} * prod rho_j^{a_j}, with a0 in [0, w).
struct ExponentVector {
  int a0 = 0;
  std::vector<long> a;
  auto operator<=>(const ExponentVector&) const = default;
};

// Unordered solution of tau0 + tau1 = 1, stored with tau0 <= tau1.
struct SUnitSolution {
  ExponentVector tau0;
  ExponentVector tau1;
  SUnitSolution() = default;
  SUnitSolution(ExponentVector x, ExponentVector y);
  auto operator<=>(const SUnitSolution&) const = default;
};

class BoundReductionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SUnitGroupSpec {
 public:
  SUnitGroupSpec(const FieldSpec& f, NFElem rho0, std::vector<NFElem> free_gens);
  // Generators shipped in data/sunit_groups.json; validated on load.
  static const SUnitGroupSpec& load(FieldLabel l);

  const FieldSpec& field() const { return *f_; }
  const NFElem& rho0() const { return rho0_; }
  const std::vector<NFElem>& free_gens() const { return free_; }
  int t() const { return static_cast<int>(free_.size()); }
  int w() const { return f_->w; }

  NFElem value(const ExponentVector& v) const;
  // Normalized exponent vector (a0 reduced mod w).
  ExponentVector normalize(ExponentVector v) const;
  // Exponents of an S-unit; nullopt if x is not an S-unit.
  std::optional<ExponentVector> exponents_of(const NFElem& x) const;

  // log |rho_j|_{p_i} for places i = 0..t and j = 1..t (complex places
  // squared), at 256 bits.
  const std::vector<std::vector<Real>>& log_matrix() const { return logm_; }
  const std::vector<int>& ords() const { return ords_; }

  // Throws std::runtime_error describing the first failed check: S-unit
  // property, order of rho0, independence, the non-positive-real condition
  // at every infinite place, and p-saturation for every prime up to the
  // regulator index bound.
  void validate() const;
  // Primes p for which saturation was proven by validate().
  std::vector<int> saturation_primes() const;

 private:
  const FieldSpec* f_;
  NFElem rho0_;
  std::vector<NFElem> free_;
  std::vector<std::vector<Real>> logm_;
  std::vector<int> ords_;
};

long height_H(const ExponentVector& v);
PlaceIndex extremal_index(const SUnitGroupSpec& g, const ExponentVector& v);
// Extremal index of a solution (chooses b as in the definition of eps(s)).
PlaceIndex extremal_index(const SUnitGroupSpec& g, const SUnitSolution& s);
long height_H(const SUnitSolution& s);
bool is_solution(const SUnitGroupSpec& g, const SUnitSolution& s);
std::set<SUnitSolution> cycle(const SUnitGroupSpec& g, const SUnitSolution& s);

Real compute_c3(const SUnitGroupSpec& g);

struct BoundReport {
  FieldLabel field = FieldLabel::K0;
  Real c3;
  std::vector<Real> c11, c12, c13, c14p, c15p;  // indexed by infinite place h - 1
  Real C11, C15, C0;
  // Lattice reduction, last successful round, per infinite place.
  std::vector<Int> C;
  std::vector<Real> C1, S_L, T_L;
  std::vector<long> C0p_place;
  std::vector<Real> C0_history;  // C0 fed to each round
  long C0p = 0;
};

// Modified height h'(alpha) under a fixed embedding (place), degree n.
Real modified_height(const NFElem& a, int place);
Real modified_height_root_of_unity(int w, int degree);
// The Baker-Wustholz constant C(t, n).
Real bw_constant(int t, int n);

BoundReport baker_bound(const SUnitGroupSpec& g);
// One lattice-reduction round at the given C0 for a single place; returns
// the reduced bound, or nullopt if no C satisfied the condition within the
// retry budget.
struct PlaceReduction {
  Int C;
  Real C1, S_L, T_L;
  long bound = 0;
};
std::optional<PlaceReduction> reduce_at_place(const SUnitGroupSpec& g, const BoundReport& r, const Real& C0, int place);
// Repeats the reduction, feeding each new bound back in, until it stops
// improving. Throws BoundReductionError if the first round fails.
BoundReport reduce_bound(const SUnitGroupSpec& g, BoundReport report);

struct SieveStats {
  std::vector<std::uint64_t> primes;
  std::uint64_t candidates = 0;
  std::uint64_t survivors = 0;
  std::uint64_t verified = 0;
};

// All tau0 in the box H <= bound (every a0) with 1 - tau0 an S-unit, as
// solutions; not closed under cycles.
std::set<SUnitSolution> sieve_box(const SUnitGroupSpec& g, long bound, SieveStats* stats = nullptr);
// Solutions with extremal index != 0 and H <= bound, closed under cycles.
std::set<SUnitSolution> sieve_solve(const SUnitGroupSpec& g, long bound, SieveStats* stats = nullptr);
// Exact enumeration of the same box without any congruence filtering.
std::set<SUnitSolution> brute_force(const SUnitGroupSpec& g, long bound);

// Table values used as floors and references.
long reference_C0p(FieldLabel l);
double reference_C0(FieldLabel l);
int reference_solution_count(FieldLabel l);

struct SolveResult {
  BoundReport report;
  long sieve_bound = 0;
  std::set<SUnitSolution> solutions;
  SieveStats stats;
};
SolveResult solve_all(FieldLabel l);

}  // namespace picard
