#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "picard/arith.hpp"
#include "picard/nf.hpp"
#include "picard/poly.hpp"
#include "picard/sunit.hpp"

namespace picard {

// Homogeneous binary form of degree r over Q; a[i] is the coefficient of
// X^i Z^{r-i}.
class BinaryForm {
 public:
  BinaryForm() = default;
  explicit BinaryForm(std::vector<Rat> low_to_high);
  // Coefficients listed from X^r down to Z^r.
  static BinaryForm from_high(const std::vector<Rat>& high_to_low);
  static BinaryForm linear(const Rat& x_coeff, const Rat& z_coeff);

  int degree() const { return static_cast<int>(a_.size()) - 1; }
  const std::vector<Rat>& coeffs() const { return a_; }
  std::vector<Rat> coeffs_high() const;
  const Rat& coeff(int i) const { return a_[static_cast<std::size_t>(i)]; }
  bool is_zero() const;

  // F(x, 1).
  QPoly dehomogenize() const;
  static BinaryForm homogenize(const QPoly& p, int degree);
  Rat eval(const Rat& x, const Rat& z) const;

  BinaryForm operator*(const BinaryForm& o) const;
  BinaryForm operator*(const Rat& s) const;
  bool operator==(const BinaryForm& o) const = default;
  auto operator<=>(const BinaryForm& o) const { return a_ <=> o.a_; }

  // Rational multiple with coprime integer coefficients whose first
  // nonzero coefficient from X^r down is positive.
  BinaryForm primitive() const;
  std::string to_string() const;

 private:
  std::vector<Rat> a_;
};

// 2x2 matrix (a b; c d) acting by F_U(X, Z) = F(aX + bZ, cX + dZ).
struct QMat2 {
  Rat a = 1, b = 0, c = 0, d = 1;
  Rat det() const { return a * d - b * c; }
  QMat2 operator*(const QMat2& o) const;
  bool operator==(const QMat2&) const = default;
};

// D(F) via the resultant of a dehomogenization; D(F) = a_r^{2r-2}
// prod_{i<j} (x_i - x_j)^2 for F = a_r prod (X - x_i Z). Throws for r < 2.
Rat discriminant(const BinaryForm& f);
// lambda * F_U. Throws for singular U.
BinaryForm act(const BinaryForm& f, const QMat2& u, const Rat& lambda = Rat(1));
// Degree >= 2: D(F) = +-3^k. Degree 1: coefficients generate Z[1/3].
bool good_reduction_outside_3(const BinaryForm& f);

// Ordered field labels with the closure M of their compositum. A single
// rational component is placed last.
class FieldSystem {
 public:
  FieldSystem() = default;
  // Reorders per the rule above; throws for combinations outside the
  // supported table.
  explicit FieldSystem(std::vector<FieldLabel> components);
  const std::vector<FieldLabel>& components() const { return comps_; }
  FieldLabel closure() const { return closure_; }
  int degree() const;
  // Sorted display name such as "(K0,K0,K1)".
  std::string name() const;
  static FieldSystem from_name(const std::string& s);
  bool operator==(const FieldSystem&) const = default;
  auto operator<=>(const FieldSystem&) const = default;

 private:
  std::vector<FieldLabel> comps_;
  FieldLabel closure_ = FieldLabel::K0;
};

// The quartic systems with every component unramified outside 3.
std::vector<FieldSystem> quartic_field_systems();

// Index bookkeeping for a field system: each index i carries an embedding of
// its component field into the closure M, and Gal(M/Q) acts on indices.
class SystemFrame {
 public:
  explicit SystemFrame(const FieldSystem& fs);
  const FieldSystem& system() const { return fs_; }
  const FieldSpec& closure() const { return *m_; }
  int r() const { return static_cast<int>(comp_of_.size()); }
  int component_of(int i) const { return comp_of_[static_cast<std::size_t>(i)]; }
  // First index of the component block containing i.
  int block_start(int i) const { return start_[static_cast<std::size_t>(component_of(i))]; }
  // Image in M of the generator of the component field under index i.
  const NFElem& root(int i) const { return roots_[static_cast<std::size_t>(i)]; }
  // x in the component field of i, mapped into M by the embedding of i.
  NFElem embed(int i, const NFElem& x) const;
  int group_order() const { return static_cast<int>(autos_.size()); }
  NFElem apply(int s, const NFElem& x) const;
  int perm(int s, int i) const { return perms_[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)]; }
  // sigma_s(zeta) = zeta^chi for the torsion generator zeta of M.
  int chi(int s) const { return chi_[static_cast<std::size_t>(s)]; }

  // S-unit group of M and exponent arithmetic in it.
  const SUnitGroupSpec& group() const { return *g_; }
  ExponentVector act(int s, const ExponentVector& v) const;
  ExponentVector add(const ExponentVector& x, const ExponentVector& y) const;
  ExponentVector scale(const ExponentVector& x, long k) const;
  ExponentVector minus_one() const;
  // Exponents in M of the embedding (index block_start) of generator j of
  // the component group (j = 0 is its torsion generator).
  const ExponentVector& component_generator(int comp, int j) const {
    return comp_gens_[static_cast<std::size_t>(comp)][static_cast<std::size_t>(j)];
  }
  // Some s with perm(s, block_start(i)) = i.
  int carrier(int i) const { return carrier_[static_cast<std::size_t>(i)]; }

 private:
  FieldSystem fs_;
  const FieldSpec* m_;
  std::vector<int> comp_of_, start_;
  std::vector<NFElem> roots_, autos_;
  std::vector<std::vector<int>> perms_;
  std::vector<int> chi_;
  const SUnitGroupSpec* g_;
  std::vector<std::vector<ExponentVector>> gen_images_;  // [s][j], free generators
  std::vector<std::vector<ExponentVector>> comp_gens_;
  std::vector<int> carrier_;
};

FieldSystem field_system_of(const BinaryForm& f);

using FactorVector = std::array<NFElem, 2>;  // (alpha, beta) for alpha X + beta Z

struct ProperFactorization {
  BinaryForm form;  // possibly replaced by an equivalent form
  FieldSystem system;
  Rat lambda = 1;
  std::vector<FactorVector> vectors;  // indexed as in SystemFrame(system)
};

// Throws std::invalid_argument for forms that are not squarefree or not good
// outside 3.
ProperFactorization s_proper_factorization(const BinaryForm& f);
// Expands lambda * prod <a_i, X> over M and returns it as a rational form;
// throws if a coefficient is not rational.
BinaryForm expand_factors(const std::vector<FactorVector>& v, const Rat& lambda = Rat(1));

using CompanionMatrix = std::vector<std::vector<NFElem>>;

struct CompanionData {
  CompanionMatrix delta;
  std::vector<NFElem> omega;
  // cross[{i,j,k,l}] for pairwise distinct indices.
  std::map<std::array<int, 4>, NFElem> cross;
};

CompanionMatrix companion_matrix(const std::vector<FactorVector>& v);
// Asserts the cross-ratio identity on every quadruple and the discriminant
// product formula; throws std::logic_error on failure.
CompanionData companion_data(const ProperFactorization& pf);
// Right side of the Delta equation for the pair (i, j), r = 4.
NFElem delta_equation_rhs(const std::vector<NFElem>& omega, const std::map<std::array<int, 4>, NFElem>& cross,
                          int i, int j);

// Index k in 0..5 of the anharmonic function with [p0, p1, p2, p3] =
// f_k(lambda), lambda = [0,1,2,3]; f = lambda, 1 - lambda, 1/lambda,
// 1/(1 - lambda), lambda/(lambda - 1), (lambda - 1)/lambda.
int anharmonic_index(const std::array<int, 4>& p);
NFElem anharmonic(int k, const NFElem& lambda);

// A solution value tau with the exponents of tau and of 1 - tau.
struct TauValue {
  NFElem value;
  ExponentVector e, e1;
};
// tau0 and tau1 of every solution, sorted by value and distinct.
std::vector<TauValue> tau_values(const SUnitGroupSpec& g, const std::set<SUnitSolution>& sols);

struct OmegaCandidate {
  // Exponents per component group (torsion in a0), in component order.
  std::vector<ExponentVector> exponents;
  std::vector<ExponentVector> omega;  // r exponent vectors in M
};
std::vector<NFElem> omega_values(const SystemFrame& frame, const OmegaCandidate& c);

// Iterates Omega lists with free exponents in [0, 12) and torsion in [0, w)
// for each component; conjugate indices follow by Galois action.
class OmegaIterator {
 public:
  explicit OmegaIterator(const SystemFrame& frame);
  bool next(OmegaCandidate& out);
  std::uint64_t size() const { return total_; }

 private:
  const SystemFrame* frame_;
  std::vector<const SUnitGroupSpec*> groups_;
  std::vector<int> bounds_;  // per digit
  std::vector<int> digit_;
  std::uint64_t total_ = 1;
  bool done_ = false;
};

// Lambda values compatible with the Galois action on indices.
std::vector<TauValue> compatible_lambdas(const SystemFrame& frame, const std::vector<TauValue>& taus);

// All companion matrices for the given Omega list and lambda = [0,1,2,3]:
// Delta_ij^6 must match the Delta equation, and the result must respect
// antisymmetry, Galois equivariance, Omega_i = prod_k Delta_ik and lambda.
std::vector<CompanionMatrix> delta_candidates(const SystemFrame& frame, const OmegaCandidate& omega,
                                              const TauValue& lambda);

struct UBetaMatrix {
  Int theta, psi, phi;
  bool operator==(const UBetaMatrix&) const = default;
};
// The set U_delta for |delta|_S = abs_delta (a positive integer prime to 3).
std::vector<UBetaMatrix> u_delta(const Int& abs_delta);

struct ReconstructedForm {
  BinaryForm form;
  std::vector<FactorVector> vectors;
  UBetaMatrix b;
};

// Forms G = prod <a'_i, X> with a'_i = B' Lambda a_i-coordinates, for every
// B' in U_beta; empty if the matrix admits no rational form.
std::vector<ReconstructedForm> reconstruct_forms(const SystemFrame& frame, const CompanionMatrix& delta,
                                                 Int* beta_s = nullptr);

enum class EquivMode { OS, OS0 };

struct EquivWitness {
  Rat lambda;
  QMat2 u;
};

// G = lambda F_U with lambda in +-3^Z and U in GL2(Z[1/3]) (upper triangular
// for OS0), or nullopt.
std::optional<EquivWitness> equiv_test(const BinaryForm& f, const BinaryForm& g, EquivMode mode);

// Absolute invariant of a quartic, constant on O_S classes: I^3 / J^2, with
// J = 0 mapped to the string "inf".
std::string quartic_invariant_key(const BinaryForm& f);

struct F4Record {
  BinaryForm form;
  std::vector<FactorVector> vectors;
  std::vector<ExponentVector> omega_exponents;
  int lambda_index = 0;
  UBetaMatrix b;
};

struct F4Stats {
  std::uint64_t omega_candidates = 0;
  std::uint64_t lambdas = 0;
  std::uint64_t companion_matrices = 0;
  std::uint64_t raw_forms = 0;
  std::uint64_t max_beta = 0;
};

// One representative per O_S class found (screened by equiv_test).
std::vector<F4Record> build_F4(const FieldSystem& fs, const std::vector<TauValue>& taus, F4Stats* stats = nullptr);

// Quintics Z_[tau] H over all tau and ordered index triples, with
// D in O_S^x and Z_[tau] not dividing H; sorted, distinct.
std::vector<BinaryForm> extend_to_quintic(const F4Record& h, const std::vector<TauValue>& taus);

struct QuinticLinearPair {
  BinaryForm quintic;  // Z * quartic
  BinaryForm linear;   // Z
  BinaryForm quartic;
  QMat2 u;             // quintic = G_U for the source G
};

// One pair (G_U, Z) per rational linear factor of G.
std::vector<QuinticLinearPair> to_quintic_linear_pairs(const BinaryForm& g);

// Quartic cofactors F of all pairs (ZF, Z) from the given quintics, one per
// O_S^0 class, in order of first appearance.
std::vector<BinaryForm> pair_quartic_classes(const std::vector<BinaryForm>& quintics);

// U in SL2(Z) with L_U = Z for a linear form with coefficients generating
// Z[1/3] (the form is scaled to a primitive integral one first).
QMat2 linear_to_z(const BinaryForm& l);

}  // namespace picard
