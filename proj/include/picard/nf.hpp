#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "picard/arith.hpp"
#include "picard/linalg.hpp"
#include "picard/poly.hpp"
#include "picard/real.hpp"

namespace picard {

enum class FieldLabel { K0, K1, K2, K3, L3 };

inline constexpr std::array<FieldLabel, 5> kAllFields{FieldLabel::K0, FieldLabel::K1, FieldLabel::K2,
                                                      FieldLabel::K3, FieldLabel::L3};

std::string to_string(FieldLabel l);
FieldLabel field_label_from_string(const std::string& s);

enum class PlaceKind { Finite, Real, Complex };

struct PlaceIndex {
  int index = 0;
  PlaceKind kind = PlaceKind::Finite;
  bool operator==(const PlaceIndex&) const = default;
};

// One of the five fixed number fields, with its places and stored roots.
struct FieldSpec {
  FieldLabel label = FieldLabel::K0;
  int degree = 1;
  std::vector<Int> min_poly;  // monic, constant term first
  int r1 = 1;
  int r2 = 0;
  int w = 2;
  // One root per infinite place: real places first, then one root of each
  // conjugate pair with positive imaginary part. Decimal strings as stored.
  std::vector<std::pair<std::string, std::string>> root_strings;
  // Rows: power-basis coordinates of a Z[1/3]-basis of the S-integers.
  QMatrix s_integral_basis;
  QMatrix s_integral_basis_inv;

  int num_infinite_places() const { return r1 + r2; }
  // Places 0 (above 3), 1..r1 (real), r1+1..r1+r2 (complex).
  std::vector<PlaceIndex> places() const;
  QPoly min_poly_q() const;
  // Root attached to an infinite place, refined to the current precision.
  Complex root(int place) const;
  // Values of the generator under all n embeddings: real ones, then each
  // complex root followed by its conjugate.
  std::vector<Complex> all_roots() const;
};

// Loads (once) and returns the field table; validates min polys against the
// fixed definitions and stored roots against the polynomials.
const FieldSpec& field(FieldLabel l);
std::string data_dir();

class NFElem {
 public:
  NFElem() = default;
  NFElem(const FieldSpec& f, std::vector<Rat> coords);
  static NFElem from_rat(const FieldSpec& f, const Rat& x);
  static NFElem gen(const FieldSpec& f);

  const FieldSpec& field() const { return *f_; }
  const std::vector<Rat>& coords() const { return c_; }
  bool is_zero() const;
  bool is_rational() const;
  Rat rational_value() const;  // requires is_rational()

  NFElem operator+(const NFElem& o) const;
  NFElem operator-(const NFElem& o) const;
  NFElem operator-() const;
  NFElem operator*(const NFElem& o) const;
  NFElem operator*(const Rat& s) const;
  NFElem operator/(const NFElem& o) const;
  NFElem inverse() const;
  NFElem pow(long e) const;
  bool operator==(const NFElem& o) const;
  bool operator!=(const NFElem& o) const { return !(*this == o); }
  bool operator<(const NFElem& o) const { return c_ < o.c_; }

  QMatrix mult_matrix() const;

 private:
  void check_same(const NFElem& o) const;
  const FieldSpec* f_ = nullptr;
  std::vector<Rat> c_;
};

enum class ArithOp { Add, Sub, Mul, Div };
NFElem nf_arith(const NFElem& a, const NFElem& b, ArithOp op);

Rat norm(const NFElem& a);
QPoly charpoly(const NFElem& a);
int ord_at_3(const NFElem& a);
bool is_s_integral(const NFElem& a);
bool is_s_unit(const NFElem& a);
Real s_norm(const NFElem& a);

struct Embedding {
  Complex value;
  Real radius;  // certified bound on the absolute error
};
// Image of a under the embedding attached to an infinite place.
Embedding embed(const NFElem& a, const PlaceIndex& place, unsigned precision_bits);
// Same, at the current working precision, without the error bound.
Complex embed_value(const NFElem& a, int place);
std::vector<Complex> embed_all(const NFElem& a);

// Rational polynomial evaluated at a field element.
NFElem eval_at(const QPoly& p, const NFElem& x);

// All roots of p lying in the field, found numerically and verified exactly.
std::vector<NFElem> roots_in_field(const QPoly& p, const FieldSpec& f);

// Some y in the field with y^k = x, if one exists.
std::optional<NFElem> nth_root(const NFElem& x, int k);

// Field automorphisms (for the Galois fields), as images of the generator;
// the identity comes first. For K3 only the identity is returned.
const std::vector<NFElem>& automorphism_images(const FieldSpec& f);
NFElem apply_automorphism(const NFElem& sigma_theta, const NFElem& a);

}  // namespace picard
