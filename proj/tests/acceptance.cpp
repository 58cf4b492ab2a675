// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <json.hpp>
#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "wordmeasure/measures.hpp"

using namespace wm;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail = what;
      pass = false;
    }
  }
};

int failures = 0;

void criterion(int id, const char* title, double limit_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_seconds > 0 && secs > limit_seconds) o.require(false, "time limit exceeded");
  std::ostringstream line;
  line << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " (" << std::fixed << std::setprecision(2)
       << secs << " s)";
  if (!o.detail.empty()) line << " -- " << o.detail;
  std::cout << line.str() << std::endl;
  if (!o.pass) ++failures;
}

Word w(const char* s, int r = 2) { return parse_word(s, r); }

const Polynomial kN = Polynomial::monomial(1, 1);

RationalFunction pow_n(int e) { return RationalFunction::power_of_n(e); }

template <typename F>
double timed(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string run_cli(const std::string& args, int* code) {
  const std::string cmd = std::string(WM_CLI_PATH) + " " + args + " 2>/dev/null";
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) {
    *code = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  const int status = pclose(p);
  *code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

std::string describe(const TraceEstimate& e, double target) {
  std::ostringstream os;
  os << std::setprecision(5) << "mean " << e.mean.real() << (e.mean.imag() < 0 ? "-" : "+") << std::abs(e.mean.imag())
     << "i target " << target << " stderr " << e.stderr_re << " (" << (e.mean.real() - target) / e.stderr_re << " se)";
  return os.str();
}

}  // namespace

int main() {
  std::cout << "acceptance suite" << std::endl;

  criterion(1, "reference-value regression", 0, [] {
    Outcome o;
    double worst = 0;
    worst = std::max(worst, timed([&] {
      const RationalFunction f = trace_rational(w("xxyyyxxY"), Modulus(2));
      o.require(f == RationalFunction(Polynomial::constant(3) * kN - Polynomial::constant(4), kN * Polynomial::shifted(1)),
                "x^2y^3x^2y^-1 at m=2 gave " + f.to_string());
      o.require(f.n_min() <= 2, "n_min above 2");
    }));
    const Word sq = w("x1x1x2x2");
    worst = std::max(worst, timed([&] { o.require(trace_rational(sq, Modulus(2)) == pow_n(-1), "x1^2x2^2 at m=2"); }));
    worst = std::max(worst, timed([&] { o.require(trace_rational(sq, Modulus(3)).is_zero(), "x1^2x2^2 at m=3"); }));
    worst = std::max(worst, timed([&] { o.require(trace_rational(sq, Modulus::infinity()).is_zero(), "x1^2x2^2 at inf"); }));
    worst = std::max(worst, timed([&] {
      o.require(trace_rational(sq, Modulus(1)) ==
                    RationalFunction::constant(1) + RationalFunction(Polynomial::constant(1), Polynomial::shifted(1)),
                "x1^2x2^2 at m=1");
    }));
    worst = std::max(worst, timed([&] { o.require(enumerate_fringe(sq).size() == 7, "fringe size is not 7"); }));
    o.require(worst < 1.0, "a single computation took over 1 s");
    if (o.pass) o.detail = "slowest item " + std::to_string(worst) + " s";
    return o;
  });

  criterion(2, "surface-word exactness", 10, [] {
    Outcome o;
    for (int g : {1, 2}) {
      const WordAnalysis a(orientable_surface_word(g));
      for (Modulus m : {Modulus(2), Modulus(3), Modulus::infinity()}) {
        const std::string tag = "g=" + std::to_string(g) + " m=" + m.to_string();
        o.require(a.trace(m) == pow_n(1 - 2 * g), tag + " trace " + a.trace(m).to_string());
        const ChiReport r = chi_report(a, m);
        o.require(r.chi == 1 - 2 * g, tag + " chi");
        o.require(r.leading_coefficient == 1, tag + " C");
        o.require(r.unique_ae, tag + " unique_ae");
      }
    }
    return o;
  });

  criterion(3, "Aut-invariance xyxy^-1 ~ x^2y^2", 0, [] {
    Outcome o;
    const WordAnalysis a(w("xyxY")), b(w("xxyy"));
    for (Modulus m : {Modulus(1), Modulus(2), Modulus(3), Modulus::infinity()})
      o.require(a.trace(m) == b.trace(m), "differs at m=" + m.to_string());
    return o;
  });

  criterion(4, "combinatorial and analytic (chi, C) agree, |w| <= 8", 300, [] {
    Outcome o;
    long long words = 0, reports = 0, mismatches = 0;
    for (const Word& v : wmtest::reduced_words_up_to(8, 2)) {
      if (!wmtest::cyclically_reduced(v)) continue;
      ++words;
      const WordAnalysis a(v);
      for (Modulus m : {Modulus(2), Modulus(3), Modulus::infinity()}) {
        ++reports;
        try {
          (void)chi_report(a, m);
        } catch (const InternalError& e) {
          if (mismatches++ == 0) o.require(false, e.what());
        }
      }
    }
    o.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
    if (o.pass) o.detail = std::to_string(words) + " words, " + std::to_string(reports) + " reports, 0 mismatches";
    return o;
  });

  criterion(5, "exhaustive oracle equals formula, |w| <= 5, m in {2,3}, N <= 3", 600, [] {
    Outcome o;
    long long checks = 0;
    for (const Word& v : wmtest::reduced_words_up_to(5, 2)) {
      const WordAnalysis a(v);
      for (unsigned m : {2u, 3u}) {
        const RationalFunction f = a.trace(Modulus(m));
        for (int n = static_cast<int>(f.n_min()); n <= 3; ++n) {
          ++checks;
          const mpq_class ex = exhaustive_trace(v, m, n);
          o.require(ex == f.evaluate_at(n), to_string(v) + " m=" + std::to_string(m) + " N=" + std::to_string(n) +
                                               ": exhaustive " + ex.get_str() + " vs " + f.evaluate_at(n).get_str());
        }
      }
    }
    if (o.pass) o.detail = std::to_string(checks) + " exact comparisons";
    return o;
  });

  criterion(6, "primitivity rank", 0, [] {
    Outcome o;
    const PrimitivityRank x = primitivity_rank(w("x", 1));
    o.require(!x.pi && x.leading_coefficient == 0, "pi(x)");
    const PrimitivityRank s = primitivity_rank(w("x1x1x2x2"));
    o.require(s.pi == 2 && s.leading_coefficient == 1, "pi(x1^2x2^2)");
    const PrimitivityRank q = primitivity_rank(w("xx", 1));
    o.require(q.pi == 1 && q.leading_coefficient == 1, "pi(x^2)");
    for (int n = 2; n <= 5; ++n) {
      long long total = 0, count = 0;
      for (const auto& p : wmtest::all_permutations(n)) {
        total += wmtest::fixed_points(wmtest::compose(p, p));
        ++count;
      }
      const mpq_class direct = wmtest::ratio(total, count);
      o.require(direct == 2, "E[fix(s^2)] over S_" + std::to_string(n) + " is " + direct.get_str());
      o.require(exhaustive_trace(w("xx", 1), 1, n) == direct, "sampler oracle disagrees at N=" + std::to_string(n));
      o.require(q.trace.evaluate_at(n) == direct, "formula disagrees at N=" + std::to_string(n));
    }
    return o;
  });

  criterion(7, "expected common fixed points of a subgroup", 0, [] {
    Outcome o;
    o.require(expected_fixed_points_subgroup({w("x"), w("y")}) == pow_n(-1), "{x,y}");
    const RationalFunction f = expected_fixed_points_subgroup({w("xx"), w("y")});
    const auto lp = laurent_prefix(f, 1);
    o.require(!lp.empty() && lp[0].exponent == -1, "{x^2,y} leading exponent");
    o.require(f != pow_n(-1), "{x^2,y} is identically 1/N");
    for (int n = 1; n <= 4; ++n) {
      long long total = 0, count = 0;
      wmtest::for_each_permutation_tuple(n, 2, [&](const std::vector<std::vector<int>>& s) {
        const auto sq = wmtest::compose(s[0], s[0]);
        for (int i = 0; i < n; ++i) total += sq[static_cast<std::size_t>(i)] == i && s[1][static_cast<std::size_t>(i)] == i;
        ++count;
      });
      const mpq_class direct = wmtest::ratio(total, count);
      o.require(n < f.n_min() || f.evaluate_at(n) == direct, "{x^2,y} formula vs direct count at N=" + std::to_string(n));
      o.require(exhaustive_common_fixed_points({w("xx"), w("y")}, n) == direct, "sampler oracle at N=" + std::to_string(n));
    }
    if (o.pass) o.detail = "{x^2,y} -> " + f.to_string();
    return o;
  });

  criterion(8, "Frobenius character checks on S_3", 0, [] {
    Outcome o;
    o.require(s3_character_expectation(w("xyXY"), S3Irrep::Standard) == mpq_class(1, 2), "[x,y] standard");
    o.require(s3_character_expectation(orientable_surface_word(2), S3Irrep::Standard) == mpq_class(1, 8),
              "[x1,y1][x2,y2] standard");
    o.require(s3_character_expectation(w("xx", 1), S3Irrep::Sign) == 1, "x^2 sign");
    return o;
  });

  criterion(9, "Monte Carlo corroboration (1e5 samples, 4 stderr)", 0, [] {
    Outcome o;
    struct Case {
      const char* word;
      GroupSpec group;
      double target;
      std::uint64_t seed;
    };
    const std::vector<Case> cases = {
        {"xyXY", {GroupFamily::Unitary, 1, 10}, 0.1, 101},
        {"xx", {GroupFamily::Unitary, 1, 8}, 0.0, 102},
        {"xx", {GroupFamily::Orthogonal, 1, 8}, 1.0, 103},
        {"xxyyyxxY", {GroupFamily::Wreath, 2, 5}, 0.55, 104},
        {"xxyy", {GroupFamily::Orthogonal, 1, 10}, 0.1, 105},
    };
    std::string summary;
    for (const Case& c : cases) {
      const Word v = parse_word(c.word);
      const TraceEstimate e = estimate_trace(v, c.group, 100000, c.seed);
      const bool ok = std::abs(e.mean.real() - c.target) <= 4 * e.stderr_re && std::abs(e.mean.imag()) <= 4 * e.stderr_im + 1e-15;
      const std::string line = std::string(c.word) + " on " + c.group.to_string() + ": " + describe(e, c.target);
      std::cout << "  " << line << std::endl;
      o.require(ok, line);
    }
    // Decay of the genus-2 commutator word on U(N); reported only.
    std::vector<double> xs, ys;
    for (int n : {4, 8, 16, 32}) {
      const TraceEstimate e =
          estimate_trace(orientable_surface_word(2), {GroupFamily::Unitary, 1, n}, 20000, 200 + static_cast<std::uint64_t>(n));
      std::cout << "  slope data [x1,y1][x2,y2] on U(" << n << "): " << describe(e, std::pow(n, -3.0)) << std::endl;
      if (std::abs(e.mean.real()) > 0) {
        xs.push_back(std::log(n));
        ys.push_back(std::log(std::abs(e.mean.real())));
      }
    }
    if (xs.size() >= 2) {
      double mx = 0, my = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
      mx /= static_cast<double>(xs.size());
      my /= static_cast<double>(xs.size());
      double sxy = 0, sxx = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
      std::cout << "  observed log-log slope (no gate; predicted -3, dominated by noise for large N): " << sxy / sxx
                << std::endl;
    }
    return o;
  });

  criterion(10, "m-stabilization at m = |w|+1, |w| <= 6", 0, [] {
    Outcome o;
    long long words = 0;
    for (const Word& v : wmtest::reduced_words_up_to(6, 2)) {
      ++words;
      const WordAnalysis a(v);
      const Modulus m(static_cast<unsigned>(v.size()) + 1);
      o.require(a.trace(m) == a.trace(Modulus::infinity()), to_string(v));
    }
    if (o.pass) o.detail = std::to_string(words) + " words";
    return o;
  });

  criterion(11, "determinism of CLI output", 0, [] {
    Outcome o;
    const std::vector<std::string> commands = {
        "trace --word xxyyyxxY --m 2",
        "trace --word xyXYzaZA --m inf",
        "chi --word xxyyyxxY --m 2",
        "chi --word xyXY --m inf",
        "pi --word x1x1x2x2",
        "fringe --word x1x1x2x2 --list",
        "fringe --word xxyyyxxY --list --m 2",
        "subgroup-fix --gens xx,y",
        "bounds --word xyXYxyXY",
        "surface-test --word xyxY --genus 2 --nonorientable",
        "oracle --word xyXY --m 3 --dim 3",
        "--threads 2 chi --word xyXYxyXY --m 3",
        "--format plain trace --word xxyy --m 1",
        "sample --word xyXY --group u:6 --samples 3000 --seed 17",
        "sample --word xyXY --group u:6 --samples 3000 --seed 17 --chains 3",
        "sample --word xxyyyxxY --group wreath:2:5 --samples 3000 --seed 18",
    };
    for (const std::string& c : commands) {
      int c1 = 0, c2 = 0, c3 = 0;
      const std::string a = run_cli("--no-timing " + c, &c1);
      const std::string b = run_cli("--no-timing " + c, &c2);
      o.require(c1 == 0 && c2 == 0, c + ": nonzero exit");
      o.require(a == b, c + ": outputs differ");
      // With timing on, everything except the timing field still matches.
      if (c.find("--format plain") == std::string::npos) {
        auto j = nlohmann::json::parse(run_cli(c, &c3));
        j.erase("timing");
        o.require(j == nlohmann::json::parse(a), c + ": payload changes with timing enabled");
      }
    }
    if (o.pass) o.detail = std::to_string(commands.size()) + " commands, byte-identical";
    return o;
  });

  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " criteria FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
