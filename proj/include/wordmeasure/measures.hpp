#pragma once

// Exact expected traces on C_m wr S_N, S^1 wr S_N and S_N, and the invariants
// read off from them.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wordmeasure/core_graph.hpp"
#include "wordmeasure/errors.hpp"
#include "wordmeasure/fringe.hpp"
#include "wordmeasure/ratfun.hpp"
#include "wordmeasure/sampler.hpp"
#include "wordmeasure/words.hpp"

namespace wm {

/// A word together with the fringe of its cyclic reduction, so traces for
/// several moduli share one enumeration.
class WordAnalysis {
 public:
  explicit WordAnalysis(const Word& w, const EnumerationOptions& opts = {})
      : word_(w), core_(cyclic_reduce(w).reduced) {
    if (!core_.empty()) fringe_ = enumerate_fringe(core_, opts);
  }

  [[nodiscard]] const Word& word() const { return word_; }
  [[nodiscard]] const Word& cyclic_core() const { return core_; }
  [[nodiscard]] bool trivial() const { return core_.empty(); }
  [[nodiscard]] const std::vector<FringeElement>& fringe() const { return fringe_; }

  [[nodiscard]] std::vector<const FringeElement*> q_m(Modulus m) const {
    std::vector<const FringeElement*> out;
    for (const auto& f : fringe_)
      if (passes_km_filter(f.profile, m)) out.push_back(&f);
    return out;
  }

  /// Sum of L_H over Q_m (the whole fringe for m = 1); the identity gives N.
  [[nodiscard]] RationalFunction trace(Modulus m) const {
    if (trivial()) return RationalFunction::power_of_n(1);
    std::vector<FallingFactorialRatio> terms;
    for (const FringeElement* f : q_m(m)) terms.push_back(l_factors(f->graph));
    return sum_falling_ratios(terms);
  }

 private:
  Word word_;
  Word core_;
  std::vector<FringeElement> fringe_;
};

inline RationalFunction trace_rational(const Word& w, Modulus m, const EnumerationOptions& opts = {}) {
  return WordAnalysis(w, opts).trace(m);
}

/// The validity bound N >= max_i #E_i(w) / 2 that holds for every element of
/// Q_m(w), reported for reference beside the sharper computed n_min.
inline long coverage_validity_bound(const Word& w) {
  const Word core = cyclic_reduce(w).reduced;
  std::vector<long> per_gen(static_cast<std::size_t>(core.ambient_rank()), 0);
  for (const Letter& l : core.letters()) ++per_gen[static_cast<std::size_t>(l.gen - 1)];
  const long most = per_gen.empty() ? 0 : *std::max_element(per_gen.begin(), per_gen.end());
  return std::max(1L, (most + 1) / 2);
}

struct Witness {
  CoreGraph graph;
  std::vector<Word> basis;
  int rank = 0;
};

/// nullopt stands for -infinity.
struct ChiReport {
  Modulus modulus;
  std::optional<int> chi;
  long long leading_coefficient = 0;
  std::vector<Witness> witnesses;
  std::optional<int> chi2;
  long long c2 = 0;
  bool unique_ae = false;
  RationalFunction trace;
};

namespace detail {

inline long long as_positive_integer(const mpq_class& q, const char* what) {
  if (q.get_den() != 1 || q <= 0 || !q.get_num().fits_slong_p())
    throw InternalError(std::string(what) + " is not a positive integer: " + q.get_str());
  return q.get_num().get_si();
}

}  // namespace detail

/// chi_m, its leading coefficient, witnesses and second-order data. (chi, C)
/// is computed both from the minimal ranks in Q_m and from the leading term
/// of the trace; any disagreement is an InternalError.
inline ChiReport chi_report(const WordAnalysis& a, Modulus m) {
  if (m == Modulus(1)) throw InputError("chi is defined for m >= 2 or inf; use primitivity_rank for m = 1");
  ChiReport rep;
  rep.modulus = m;
  rep.trace = a.trace(m);
  const LaurentPrefix lp = laurent_prefix(rep.trace, 2);

  std::optional<int> analytic_chi;
  long long analytic_c = 0;
  if (!lp.empty()) {
    analytic_chi = lp[0].exponent;
    analytic_c = detail::as_positive_integer(lp[0].coefficient, "leading coefficient");
  }

  std::optional<int> combinatorial_chi;
  long long combinatorial_c = 0;
  if (a.trivial()) {
    combinatorial_chi = 1;
    combinatorial_c = 1;
    rep.witnesses.push_back({CoreGraph(), {}, 0});
  } else {
    const auto qm = a.q_m(m);
    int min_rank = std::numeric_limits<int>::max();
    for (const FringeElement* f : qm) min_rank = std::min(min_rank, f->graph.rank());
    for (const FringeElement* f : qm) {
      if (f->graph.rank() != min_rank) continue;
      ++combinatorial_c;
      rep.witnesses.push_back({f->graph, spanning_tree_basis(f->graph), min_rank});
    }
    if (!qm.empty()) combinatorial_chi = 1 - min_rank;
  }

  if (combinatorial_chi != analytic_chi || combinatorial_c != analytic_c) {
    std::ostringstream os;
    os << "chi mismatch for " << to_string(a.word()) << " at m=" << m.to_string() << ": combinatorial ("
       << (combinatorial_chi ? std::to_string(*combinatorial_chi) : "-inf") << ", " << combinatorial_c
       << ") vs analytic (" << (analytic_chi ? std::to_string(*analytic_chi) : "-inf") << ", " << analytic_c << ")";
    throw InternalError(os.str());
  }
  rep.chi = combinatorial_chi;
  rep.leading_coefficient = combinatorial_c;

  if (rep.leading_coefficient >= 2) {
    rep.chi2 = rep.chi;
    rep.c2 = rep.leading_coefficient - 1;
  } else if (rep.leading_coefficient == 1 && lp.size() == 2) {
    // The next nonzero term; intermediate orders are absent by construction
    // of the expansion, and its coefficient must be a positive integer.
    rep.chi2 = lp[1].exponent;
    rep.c2 = detail::as_positive_integer(lp[1].coefficient, "second-order coefficient");
  }
  rep.unique_ae = rep.chi.has_value() && rep.trace == RationalFunction::power_of_n(*rep.chi);
  return rep;
}

inline ChiReport chi_report(const Word& w, Modulus m, const EnumerationOptions& opts = {}) {
  return chi_report(WordAnalysis(w, opts), m);
}

/// nullopt pi stands for infinity (w primitive).
struct PrimitivityRank {
  std::optional<int> pi;
  long long leading_coefficient = 0;
  RationalFunction trace;
};

/// Reads pi(w) and C from tr_w(S_N) - 1 = C N^{1-pi} + ...
inline PrimitivityRank primitivity_rank(const WordAnalysis& a) {
  if (a.trivial()) throw InputError("primitivity rank of the trivial word is undefined");
  PrimitivityRank out;
  out.trace = a.trace(Modulus(1));
  const RationalFunction rest = out.trace - RationalFunction::constant(1);
  if (rest.is_zero()) return out;
  const LaurentPrefix lp = laurent_prefix(rest, 1);
  out.pi = 1 - lp[0].exponent;
  out.leading_coefficient = detail::as_positive_integer(lp[0].coefficient, "primitivity coefficient");
  return out;
}

inline PrimitivityRank primitivity_rank(const Word& w, const EnumerationOptions& opts = {}) {
  return primitivity_rank(WordAnalysis(w, opts));
}

/// Expected number of common fixed points of phi(H) for a uniformly random
/// phi in Hom(F_r, S_N): the sum of L over all quotients of the core graph.
inline RationalFunction expected_fixed_points_subgroup(const std::vector<Word>& gens, const EnumerationOptions& opts = {}) {
  const CoreGraph g = core_graph_of_subgroup(gens);
  std::vector<FallingFactorialRatio> terms;
  for (const CoreGraph& q : enumerate_quotients(g, opts)) terms.push_back(l_factors(q));
  return sum_falling_ratios(terms);
}

/// Lower bounds from chi_inf >= 1 - 2 cl(w) and chi_2 >= 1 - min(sql, 2cl).
/// A nullopt bound means the length itself is infinite.
struct LengthBounds {
  std::optional<int> chi_infinity;
  std::optional<int> chi_2;
  std::optional<int> cl_lower;
  std::optional<int> mixed_lower;
};

inline LengthBounds length_bounds(const WordAnalysis& a) {
  LengthBounds b;
  b.chi_infinity = chi_report(a, Modulus::infinity()).chi;
  b.chi_2 = chi_report(a, Modulus(2)).chi;
  if (b.chi_infinity) b.cl_lower = (1 - *b.chi_infinity + 1) / 2;
  if (b.chi_2) b.mixed_lower = 1 - *b.chi_2;
  return b;
}

inline LengthBounds length_bounds(const Word& w, const EnumerationOptions& opts = {}) {
  return length_bounds(WordAnalysis(w, opts));
}

enum class Orientation { Orientable, NonOrientable };

struct MonteCarloOptions {
  bool enabled = false;
  int dimension = 8;
  long long samples = 100000;
  std::uint64_t seed = 1;
  double band = 4.0;  // acceptance band in standard errors
  unsigned chains = 1;
};

struct SurfaceCheck {
  std::string name;
  bool pass = false;
  std::string evidence;
};

struct SurfaceVerdict {
  Orientation orientation = Orientation::Orientable;
  int genus = 1;
  std::vector<SurfaceCheck> checks;
  /// Every necessary condition checkable here holds. This is not a proof
  /// of Aut(F_r)-equivalence with the surface word.
  bool consistent = false;
};

namespace detail {

inline std::string vector_string(const std::vector<long long>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + ")";
}

inline SurfaceCheck witness_check(const WordAnalysis& a, Modulus m, int rank, const char* name) {
  SurfaceCheck c{name, false, "no element of Q_" + m.to_string() + " of rank " + std::to_string(rank)};
  if (a.trivial()) return c;
  for (const FringeElement* f : a.q_m(m)) {
    if (f->graph.rank() != rank) continue;
    const Word rewritten = rewrite_in_basis(a.cyclic_core(), f->graph);
    if (!ambient_km_member(rewritten, m)) continue;
    std::string basis;
    for (const Word& b : spanning_tree_basis(f->graph)) basis += (basis.empty() ? "" : ",") + to_string(b);
    c.pass = true;
    c.evidence = "J = <" + basis + ">, w = " + to_string(rewritten) + " in basis, exponents " +
                 vector_string(exponent_vector(rewritten));
    return c;
  }
  return c;
}

inline SurfaceCheck monte_carlo_check(const Word& w, GroupFamily family, double target, const MonteCarloOptions& mc,
                                      const char* name) {
  GroupSpec spec{family, 1, mc.dimension};
  const TraceEstimate est = estimate_trace(w, spec, mc.samples, mc.seed, mc.chains);
  const bool re_ok = std::abs(est.mean.real() - target) <= mc.band * est.stderr_re;
  const bool im_ok = std::abs(est.mean.imag()) <= mc.band * est.stderr_im;
  std::ostringstream os;
  os.precision(6);
  os << "mean " << est.mean.real() << (est.mean.imag() < 0 ? " - " : " + ") << std::abs(est.mean.imag())
     << "i, stderr (" << est.stderr_re << ", " << est.stderr_im << "), target " << target << ", band " << mc.band
     << ", N=" << mc.dimension << ", samples " << est.samples;
  return {name, re_ok && im_ok, os.str()};
}

}  // namespace detail

/// Necessary conditions for w to induce the same measures as the genus-g
/// surface word of the given orientation.
inline SurfaceVerdict surface_test(const WordAnalysis& a, int genus, Orientation orientation,
                                   const MonteCarloOptions& mc = {}) {
  if (genus < 1) throw InputError("genus must be >= 1");
  SurfaceVerdict v;
  v.orientation = orientation;
  v.genus = genus;
  const Word& w = a.word();
  const auto exps = exponent_vector(w);

  if (orientation == Orientation::Orientable) {
    const bool zero = std::all_of(exps.begin(), exps.end(), [](long long e) { return e == 0; });
    v.checks.push_back({"abelianization_trivial", zero, "exponent vector " + detail::vector_string(exps)});

    const RationalFunction target = RationalFunction::power_of_n(1 - 2 * genus);
    const RationalFunction t_inf = a.trace(Modulus::infinity());
    v.checks.push_back({"circle_wreath_trace", t_inf == target,
                        "tr(S^1 wr S_N) = " + t_inf.to_string() + ", expected " + target.to_string()});

    v.checks.push_back(detail::witness_check(a, Modulus::infinity(), 2 * genus, "commutator_witness"));
    if (mc.enabled)
      v.checks.push_back(detail::monte_carlo_check(w, GroupFamily::Unitary, std::pow(mc.dimension, 1 - 2 * genus), mc,
                                                   "unitary_monte_carlo"));
  } else {
    const bool even = std::all_of(exps.begin(), exps.end(), [](long long e) { return e % 2 == 0; });
    const bool zero = std::all_of(exps.begin(), exps.end(), [](long long e) { return e == 0; });
    v.checks.push_back({"square_class", even && !zero,
                        "exponent vector " + detail::vector_string(exps) + " (need even and nonzero)"});

    const RationalFunction t_inf = a.trace(Modulus::infinity());
    v.checks.push_back({"circle_wreath_vanishes", t_inf.is_zero(), "tr(S^1 wr S_N) = " + t_inf.to_string()});

    const RationalFunction target = RationalFunction::power_of_n(1 - genus);
    const RationalFunction t2 = a.trace(Modulus(2));
    v.checks.push_back({"signed_permutation_trace", t2 == target,
                        "tr(C_2 wr S_N) = " + t2.to_string() + ", expected " + target.to_string()});

    v.checks.push_back(detail::witness_check(a, Modulus(2), genus, "square_witness"));
    if (mc.enabled)
      v.checks.push_back(detail::monte_carlo_check(w, GroupFamily::Orthogonal, std::pow(mc.dimension, 1 - genus), mc,
                                                   "orthogonal_monte_carlo"));
  }
  v.consistent = std::all_of(v.checks.begin(), v.checks.end(), [](const SurfaceCheck& c) { return c.pass; });
  return v;
}

inline SurfaceVerdict surface_test(const Word& w, int genus, Orientation orientation, const MonteCarloOptions& mc = {},
                                   const EnumerationOptions& opts = {}) {
  if (genus < 1) throw InputError("genus must be >= 1");
  return surface_test(WordAnalysis(w, opts), genus, orientation, mc);
}

}  // namespace wm
