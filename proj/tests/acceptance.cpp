// End-to-end acceptance checks; prints one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "picard/curves.hpp"
#include "picard/real.hpp"

using namespace picard;

namespace {

using L = FieldLabel;
using Clock = std::chrono::steady_clock;

const std::vector<L> kFields{L::K0, L::K1, L::K2, L::K3, L::L3};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Criterion {
  int id;
  std::string name;
  bool ok = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::set<SUnitSolution> restrict_box(const std::set<SUnitSolution>& s, long bound) {
  std::set<SUnitSolution> out;
  for (const auto& x : s)
    if (height_H(x) <= bound) out.insert(x);
  return out;
}

// Galois conjugation of Delta, Omega and cross ratios follows the index
// permutation; returns the number of failed comparisons.
std::size_t galois_failures(const ProperFactorization& pf, const CompanionData& cd) {
  SystemFrame fr(pf.system);
  std::size_t bad = 0;
  for (int s = 0; s < fr.group_order(); ++s) {
    for (int i = 0; i < fr.r(); ++i) {
      auto ui = static_cast<std::size_t>(i);
      if (fr.apply(s, cd.omega[ui]) != cd.omega[static_cast<std::size_t>(fr.perm(s, i))]) ++bad;
      for (int j = 0; j < fr.r(); ++j)
        if (fr.apply(s, cd.delta[ui][static_cast<std::size_t>(j)]) !=
            cd.delta[static_cast<std::size_t>(fr.perm(s, i))][static_cast<std::size_t>(fr.perm(s, j))])
          ++bad;
    }
    for (const auto& [q, x] : cd.cross)
      if (fr.apply(s, x) != cd.cross.at({fr.perm(s, q[0]), fr.perm(s, q[1]), fr.perm(s, q[2]), fr.perm(s, q[3])})) ++bad;
  }
  return bad;
}

}  // namespace

int main() {
  std::vector<Criterion> cs(7);
  for (int i = 0; i < 7; ++i) cs[static_cast<std::size_t>(i)].id = i + 1;
  cs[0].name = "S-unit solution counts";
  cs[1].name = "bound pipeline";
  cs[2].name = "63 curves in 21 blocks matching the published tables";
  cs[3].name = "no forms for (K0,K0,K0,K0) and (K1,K1)";
  cs[4].name = "simple family y^3 = x^4 + 3^s x";
  cs[5].name = "property suites";
  cs[6].name = "brute force agrees with the sieve";

  // Criteria 1 and 2.
  std::map<L, SolveResult> solved;
  for (L l : kFields) {
    auto t0 = Clock::now();
    try {
      solved[l] = solve_all(l);
    } catch (const BoundReductionError& e) {
      cs[0].require(false, to_string(l) + " bound reduction: " + e.what());
      cs[1].require(false, to_string(l) + " bound reduction: " + e.what());
      continue;
    }
    const SolveResult& r = solved[l];
    double dt = seconds_since(t0);
    std::cerr << "[progress] solved " << to_string(l) << " in " << std::lround(dt) << "s" << std::endl;
    int want = reference_solution_count(l);
    cs[0].detail << " " << to_string(l) << "=" << r.solutions.size() << "/" << want << " (" << std::lround(dt) << "s)";
    cs[0].require(static_cast<int>(r.solutions.size()) == want, to_string(l) + " count");
    cs[0].require(dt <= 15 * 60, to_string(l) + " runtime");

    double c0 = static_cast<double>(r.report.C0);
    double ratio = c0 / reference_C0(l);
    long ref_p = reference_C0p(l);
    cs[1].detail << " " << to_string(l) << ": C0=" << c0 << " (x" << ratio << "), C0'=" << r.report.C0p << "/" << ref_p;
    cs[1].require(ratio <= 10 && ratio >= 0.1, to_string(l) + " C0 within a factor of 10");
    cs[1].require(r.report.C0p <= 2 * ref_p, to_string(l) + " C0' <= 2x");
    const auto& g = SUnitGroupSpec::load(l);
    std::set<SUnitSolution> at_own = r.sieve_bound == r.report.C0p ? r.solutions : sieve_solve(g, r.report.C0p);
    cs[1].require(at_own == r.solutions, to_string(l) + " sieve at max(C0', table) changes the solution set");
  }

  // Criteria 3 and 4: the full reconstruction pipeline.
  std::map<L, std::vector<TauValue>> taus;
  for (auto& [l, r] : solved) taus[l] = tau_values(SUnitGroupSpec::load(l), r.solutions);
  std::vector<TwistBlock> blocks;
  std::vector<SystemPipeline> pipelines;
  auto tp = Clock::now();
  for (const auto& fs : quartic_field_systems()) {
    if (!taus.count(fs.closure())) continue;
    pipelines.push_back(run_system_pipeline(fs, taus[fs.closure()]));
    const auto& p = pipelines.back();
    std::cerr << "[progress] pipeline " << fs.name() << " done" << std::endl;
    cs[2].detail << " " << fs.name() << ":" << p.f4.size() << "/" << p.f5.size() << "/" << p.pair_quartics.size();
    for (auto& b : blocks_from_quartics(fs, p.pair_quartics)) blocks.push_back(std::move(b));
    bool excluded = fs == FieldSystem({L::K0, L::K0, L::K0, L::K0}) || fs == FieldSystem({L::K1, L::K1});
    if (excluded) {
      cs[3].detail << " " << fs.name() << ": " << p.f4.size() << " quartic classes, " << p.stats.lambdas
                   << " compatible cross ratios";
      cs[3].require(p.f4.empty() && p.pair_quartics.empty(), fs.name() + " produced forms");
    }
  }
  cs[3].require(pipelines.size() == 5, "pipeline did not run for every system");
  MatchReport rep = match_golden(blocks, golden_rows());
  cs[2].detail << " (F4/F5/pairs); curves=" << rep.curves << " blocks=" << rep.blocks << " matched=" << rep.matches.size()
               << "/" << rep.rows << " exact tuples=" << rep.exact_matches << " ("
               << std::lround(seconds_since(tp)) << "s)";
  cs[2].require(rep.curves == 63, "63 curves");
  cs[2].require(rep.blocks == 21, "21 blocks");
  cs[2].require(rep.perfect(), "bidirectional matching");
  for (const auto& m : rep.matches) {
    const auto& c = blocks[m.block].members[m.member];
    cs[2].require(apply_tschirnhaus(c.model, m.witness) == golden_rows()[m.row].model, "Tschirnhaus witness");
    cs[2].require(is_pm_power_of_3(model_discriminant(c.model)), "model discriminant");
  }

  // Criterion 5.
  auto fam = check_simple_family(blocks);
  for (const auto& e : fam) {
    cs[4].require(e.found, "s=" + std::to_string(e.s));
    if (e.found) cs[4].detail << " s=" << e.s << "->block " << e.block << "/" << blocks[e.block].members[e.member].alpha;
  }

  // Criterion 6.
  auto t6 = Clock::now();
  {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> deg(2, 6), coef(-30, 30), ex(0, 2);
    auto srat = [&]() -> Rat { return Rat(coef(rng)) / pow3(ex(rng)); };
    int done = 0, bad = 0;
    while (done < 500) {
      int r = deg(rng);
      std::vector<Rat> c(static_cast<std::size_t>(r + 1));
      for (auto& x : c) x = srat();
      QMat2 u{srat(), srat(), srat(), srat()};
      if (u.det() == 0) continue;
      BinaryForm f(c);
      if (discriminant(act(f, u)) != rpow(u.det(), r * (r - 1)) * discriminant(f)) ++bad;
      ++done;
    }
    cs[5].detail << " covariance " << done - bad << "/" << done << ";";
    cs[5].require(bad == 0, "discriminant covariance");

    // Every generated form: quartic classes, quintics and pair quartics.
    std::vector<BinaryForm> forms;
    for (const auto& p : pipelines) {
      for (const auto& h : p.f4) forms.push_back(h.form);
      forms.insert(forms.end(), p.f5.begin(), p.f5.end());
      forms.insert(forms.end(), p.pair_quartics.begin(), p.pair_quartics.end());
    }
    std::size_t quads = 0, galois_bad = 0, delta_bad = 0;
    bool cross_ok = true;
    for (const auto& f : forms) {
      try {
        ProperFactorization pf = s_proper_factorization(f);
        CompanionData cd = companion_data(pf);
        NFElem one = NFElem::from_rat(cd.delta[0][1].field(), 1);
        for (const auto& [q, x] : cd.cross) {
          ++quads;
          if (x + cd.cross.at({q[2], q[1], q[0], q[3]}) != one) cross_ok = false;
        }
        galois_bad += galois_failures(pf, cd);
        if (f.degree() == 4)
          for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
              if (delta_equation_rhs(cd.omega, cd.cross, i, j) !=
                  cd.delta[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].pow(6))
                ++delta_bad;
      } catch (const std::exception& e) {
        cross_ok = false;
        cs[5].detail << " factorization error on " << f.to_string() << ": " << e.what() << ";";
      }
    }
    cs[5].detail << " cross ratios " << quads << " quadruples over " << forms.size() << " forms; galois mismatches "
                 << galois_bad << "; delta equation mismatches " << delta_bad << ";";
    cs[5].require(cross_ok && !forms.empty(), "cross-ratio identity");
    cs[5].require(galois_bad == 0, "Galois equivariance");
    cs[5].require(delta_bad == 0, "delta equation");

    std::size_t sols = 0;
    bool cyc_ok = true, inf_ok = true;
    for (auto& [l, r] : solved) {
      const auto& g = SUnitGroupSpec::load(l);
      for (const auto& s : r.solutions) {
        ++sols;
        if (!is_solution(g, s)) cyc_ok = false;
        auto c = cycle(g, s);
        bool infinite = false;
        for (const auto& x : c) {
          if (!r.solutions.count(x) || cycle(g, x) != c) cyc_ok = false;
          infinite = infinite || extremal_index(g, x).index != 0;
        }
        if (!infinite) inf_ok = false;
      }
    }
    cs[5].detail << " cycles checked on " << sols << " solutions;";
    cs[5].require(cyc_ok, "cycle closure");
    cs[5].require(inf_ok, "infinite extremal place in every cycle");

    // Product formula for random S-units at 256 bits.
    PrecisionScope ps(256);
    std::uniform_int_distribution<long> e(-6, 6);
    Real worst = 0;
    for (L l : kFields) {
      const auto& g = SUnitGroupSpec::load(l);
      const FieldSpec& f = g.field();
      for (int k = 0; k < 20; ++k) {
        ExponentVector v{static_cast<int>(rng() % static_cast<unsigned>(g.w())), std::vector<long>(static_cast<std::size_t>(g.t()))};
        for (auto& a : v.a) a = e(rng);
        NFElem x = g.value(v);
        Real prod = 1;
        for (int p = 1; p <= f.r1 + f.r2; ++p) {
          Real a = abs(embed_value(x, p));
          prod *= p <= f.r1 ? a : a * a;
        }
        Rat n = norm(x);
        Real finite = pow(Real(3), -v3(n));
        Real err = abs(prod * finite - 1);
        if (err > worst) worst = err;
      }
    }
    cs[5].detail << " product formula worst error " << static_cast<double>(worst) << ";";
    cs[5].require(worst <= Real("1e-50"), "product formula");
  }
  double dt6 = seconds_since(t6);
  cs[5].detail << " " << std::lround(dt6) << "s";
  cs[5].require(dt6 <= 300, "runtime over 5 minutes");

  std::cerr << "[progress] property suites done" << std::endl;
  // Criterion 7.
  {
    const auto& k1 = SUnitGroupSpec::load(L::K1);
    auto bf = brute_force(k1, 5);
    cs[6].detail << " K1 H<=5: " << bf.size() << " brute force";
    cs[6].require(bf == restrict_box(sieve_box(k1, 5), 5), "K1 sieve box");
    if (solved.count(L::K1)) cs[6].require(bf == restrict_box(solved[L::K1].solutions, 5), "K1 solve_all restricted");
    const auto& l3 = SUnitGroupSpec::load(L::L3);
    auto bl = brute_force(l3, 3);
    cs[6].detail << "; L3 H<=3: " << bl.size() << " brute force";
    cs[6].require(bl == restrict_box(sieve_box(l3, 3), 3), "L3 sieve box");
    if (solved.count(L::L3)) cs[6].require(bl == restrict_box(solved[L::L3].solutions, 3), "L3 solve_all restricted");
  }

  bool all = true;
  for (const auto& c : cs) {
    std::cout << (c.ok ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " |" << c.detail.str() << "\n";
    all = all && c.ok;
  }
  return all ? 0 : 1;
}
