#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "picard/forms.hpp"

namespace picard {

// Coefficients (a3, a2, a1, a0) of y^3 = x^4 + a3 x^3 + a2 x^2 + a1 x + a0.
using CurveModel = std::array<Int, 4>;

std::string to_string(const CurveModel& m);
QPoly model_polynomial(const CurveModel& m);
Rat model_discriminant(const CurveModel& m);

// Reduced integral model of y^3 = f(x) for a monic quartic f whose
// coefficients lie in Z[1/3]; throws std::invalid_argument otherwise.
CurveModel normalize_model(const QPoly& monic_quartic);

struct PicardCurve {
  FieldSystem system;
  BinaryForm quartic;  // F with the curve y^3 = alpha F(x, 1)
  int alpha = 1;
  CurveModel model;
};

// y^3 = alpha F(x, 1) in reduced integral form; F must be a squarefree quartic
// with nonzero X^4 coefficient and coefficients in Z[1/3].
PicardCurve curve_from_quartic(const BinaryForm& f, int alpha);
PicardCurve curve_from_pair(const QuinticLinearPair& p, int alpha);
// Model of y^3 = alpha f(x) for an existing model f.
CurveModel twist_model(const CurveModel& m, int alpha);

// (x, y) = (s^3 x' + b, s^4 y') carries the second model onto the first.
struct Tschirnhaus {
  Rat s, b;
  // Projective matrix acting on (x : y : 1).
  std::array<std::array<Rat, 3>, 3> matrix() const;
};

// Isomorphism over Q between y^3 = f1(x) and y^3 = f2(x), with witness.
std::optional<Tschirnhaus> is_isomorphic_q(const CurveModel& c1, const CurveModel& c2);
// Applies the witness: s^-12 f1(s^3 x + b).
CurveModel apply_tschirnhaus(const CurveModel& c1, const Tschirnhaus& t);

struct TwistBlock {
  FieldSystem system;
  std::array<PicardCurve, 3> members;  // alpha = 1, 3, 9
};

// Quartic classes and intermediate counts for one field system.
struct SystemPipeline {
  FieldSystem system;
  F4Stats stats;
  std::vector<F4Record> f4;
  std::vector<BinaryForm> f5;
  std::vector<BinaryForm> pair_quartics;
};

SystemPipeline run_system_pipeline(const FieldSystem& fs, const std::vector<TauValue>& taus);

// One block per pair quartic.
std::vector<TwistBlock> blocks_from_quartics(const FieldSystem& fs, const std::vector<BinaryForm>& quartics);
// Solves the S-unit equations and runs every quartic field system.
std::vector<TwistBlock> enumerate_all();

struct GoldenRow {
  std::string table;  // "QQK1", "QK3" or "QK2"
  FieldSystem system;
  int block = 0;      // index within its table
  CurveModel model;
};

// The published curve lists, in table order.
const std::vector<GoldenRow>& golden_rows();
// Same layout read from JSON: {"QQK1": [[a3, a2, a1, a0], ...], ...}.
std::vector<GoldenRow> load_golden(const std::string& path);

struct CurveMatch {
  std::size_t block = 0, member = 0, row = 0;
  Tschirnhaus witness;
  bool exact = false;
};

struct MatchReport {
  std::size_t curves = 0, blocks = 0, rows = 0;
  std::vector<CurveMatch> matches;
  std::vector<std::pair<std::size_t, std::size_t>> unmatched_curves;  // (block, member)
  std::vector<std::size_t> unmatched_rows;
  // Distinct curves found isomorphic to each other (should be none).
  std::vector<std::pair<std::size_t, std::size_t>> duplicate_curves;  // flat indices
  // Computed blocks whose members match rows of different published blocks.
  std::vector<std::size_t> split_blocks;
  std::size_t exact_matches = 0;
  bool perfect() const {
    return unmatched_curves.empty() && unmatched_rows.empty() && duplicate_curves.empty() && split_blocks.empty() &&
           matches.size() == rows && matches.size() == curves;
  }
};

// Bidirectional matching within each field system, up to isomorphism over Q.
MatchReport match_golden(const std::vector<TwistBlock>& blocks, const std::vector<GoldenRow>& rows);

struct SimpleFamilyEntry {
  int s = 0;
  bool found = false;
  std::size_t block = 0, member = 0;
  Tschirnhaus witness;
};

// For s = 0..8 finds the curve isomorphic to y^3 = x^4 + 3^s x.
std::vector<SimpleFamilyEntry> check_simple_family(const std::vector<TwistBlock>& blocks);

}  // namespace picard
