#pragma once

// Haar sampling on S_N, C_m wr S_N, S^1 wr S_N, U(N), O(N); Monte Carlo trace
// estimation; exhaustive oracles on small groups.
//
// Random numbers: each chain runs std::mt19937_64 seeded with
// splitmix64(seed + (chain + 1) * 0x9E3779B97F4A7C15). Uniform doubles take
// the top 53 bits, normals use Box-Muller, and bounded integers use
// rejection sampling, so streams are bit-reproducible across standard
// libraries.

#include <gmpxx.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "wordmeasure/errors.hpp"
#include "wordmeasure/words.hpp"

namespace wm {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t chain_seed(std::uint64_t seed, unsigned chain) {
  return splitmix64(seed + (static_cast<std::uint64_t>(chain) + 1) * 0x9E3779B97F4A7C15ULL);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Uniform in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class GroupFamily { Symmetric, Wreath, CircleWreath, Unitary, Orthogonal };

struct GroupSpec {
  GroupFamily family = GroupFamily::Symmetric;
  unsigned m = 1;  // WREATH only
  int dimension = 1;

  void validate() const {
    if (dimension < 1) throw InputError("group dimension must be >= 1");
    if (family == GroupFamily::Wreath && m < 2) throw InputError("wreath product needs m >= 2");
  }

  /// "sym:N", "wreath:M:N", "circle:N", "u:N", "o:N".
  static GroupSpec parse(std::string_view text) {
    auto split = [](std::string_view s) {
      std::vector<std::string> parts;
      std::size_t start = 0;
      for (std::size_t i = 0; i <= s.size(); ++i)
        if (i == s.size() || s[i] == ':') {
          parts.emplace_back(s.substr(start, i - start));
          start = i + 1;
        }
      return parts;
    };
    auto number = [&](const std::string& p) {
      if (p.empty() || p.size() > 6 || !std::all_of(p.begin(), p.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw InputError("bad number '" + p + "' in group spec '" + std::string(text) + "'");
      return std::stoi(p);
    };
    const auto parts = split(text);
    GroupSpec g;
    if (parts.size() == 3 && parts[0] == "wreath") {
      g.family = GroupFamily::Wreath;
      g.m = static_cast<unsigned>(number(parts[1]));
      g.dimension = number(parts[2]);
    } else if (parts.size() == 2) {
      if (parts[0] == "sym")
        g.family = GroupFamily::Symmetric;
      else if (parts[0] == "circle")
        g.family = GroupFamily::CircleWreath;
      else if (parts[0] == "u")
        g.family = GroupFamily::Unitary;
      else if (parts[0] == "o")
        g.family = GroupFamily::Orthogonal;
      else
        throw InputError("unknown group family '" + parts[0] + "'");
      g.dimension = number(parts[1]);
    } else {
      throw InputError("group spec must be sym:N, wreath:M:N, circle:N, u:N or o:N; got '" + std::string(text) + "'");
    }
    g.validate();
    return g;
  }

  [[nodiscard]] std::string to_string() const {
    switch (family) {
      case GroupFamily::Symmetric: return "sym:" + std::to_string(dimension);
      case GroupFamily::Wreath: return "wreath:" + std::to_string(m) + ":" + std::to_string(dimension);
      case GroupFamily::CircleWreath: return "circle:" + std::to_string(dimension);
      case GroupFamily::Unitary: return "u:" + std::to_string(dimension);
      case GroupFamily::Orthogonal: return "o:" + std::to_string(dimension);
    }
    return "?";
  }
};

using Matrix = Eigen::MatrixXcd;

namespace detail {

// Fisher-Yates.
inline std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i)
    std::swap(p[static_cast<std::size_t>(i)], p[rng.below(static_cast<std::uint64_t>(i) + 1)]);
  return p;
}

// QR of a Gaussian matrix, with Q's columns rephased so that R has a
// positive diagonal. That makes Q exactly Haar distributed.
template <typename Mat>
Mat haar_from_gaussian(Mat z) {
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ();
  const Mat& packed = qr.matrixQR();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const auto d = packed(j, j);
    const double a = std::abs(d);
    if (a > 0) q.col(j) *= d / a;
  }
  return q;
}

}  // namespace detail

/// One Haar-random element as an N x N complex matrix. Monomial groups put
/// the nonzero entry of row j in column sigma(j).
inline Matrix haar_element(const GroupSpec& spec, Rng& rng) {
  spec.validate();
  const int n = spec.dimension;
  Matrix a = Matrix::Zero(n, n);
  switch (spec.family) {
    case GroupFamily::Symmetric:
    case GroupFamily::Wreath:
    case GroupFamily::CircleWreath: {
      const auto sigma = detail::random_permutation(n, rng);
      for (int j = 0; j < n; ++j) {
        std::complex<double> entry = 1.0;
        if (spec.family == GroupFamily::Wreath) {
          const auto k = rng.below(spec.m);
          entry = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / spec.m);
        } else if (spec.family == GroupFamily::CircleWreath) {
          entry = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
        }
        a(j, sigma[static_cast<std::size_t>(j)]) = entry;
      }
      return a;
    }
    case GroupFamily::Unitary: {
      const double s = std::sqrt(0.5);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = {s * rng.normal(), s * rng.normal()};
      return detail::haar_from_gaussian(std::move(a));
    }
    case GroupFamily::Orthogonal: {
      Eigen::MatrixXd z(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) z(i, j) = rng.normal();
      return detail::haar_from_gaussian(std::move(z)).cast<std::complex<double>>();
    }
  }
  return a;
}

/// w(A_1, ..., A_r) for unitary A_i (inverses are adjoints).
inline Matrix evaluate_word(const Word& w, const std::vector<Matrix>& gens) {
  const auto n = gens.empty() ? 1 : gens.front().rows();
  Matrix acc = Matrix::Identity(n, n);
  for (const Letter& l : w.letters()) {
    const Matrix& g = gens[static_cast<std::size_t>(l.gen - 1)];
    acc = l.sign > 0 ? Matrix(acc * g) : Matrix(acc * g.adjoint());
  }
  return acc;
}

struct TraceEstimate {
  std::complex<double> mean;
  double stderr_re = 0.0;
  double stderr_im = 0.0;
  long long samples = 0;
  std::uint64_t seed = 0;
  unsigned chains = 1;
};

namespace detail {

struct Moments {
  long long n = 0;
  double mean_re = 0, m2_re = 0, mean_im = 0, m2_im = 0;

  void add(std::complex<double> x) {
    ++n;
    const double dr = x.real() - mean_re;
    mean_re += dr / static_cast<double>(n);
    m2_re += dr * (x.real() - mean_re);
    const double di = x.imag() - mean_im;
    mean_im += di / static_cast<double>(n);
    m2_im += di * (x.imag() - mean_im);
  }

  void merge(const Moments& o) {
    if (o.n == 0) return;
    const auto n1 = static_cast<double>(n);
    const auto n2 = static_cast<double>(o.n);
    const double total = n1 + n2;
    const double dr = o.mean_re - mean_re;
    const double di = o.mean_im - mean_im;
    mean_re += dr * n2 / total;
    mean_im += di * n2 / total;
    m2_re += o.m2_re + dr * dr * n1 * n2 / total;
    m2_im += o.m2_im + di * di * n1 * n2 / total;
    n += o.n;
  }
};

}  // namespace detail

/// Mean trace of w over Haar-random tuples. Bit-identical for identical
/// (seed, samples, chains); chains run in parallel and are reduced in chain
/// order.
inline TraceEstimate estimate_trace(const Word& w, const GroupSpec& spec, long long samples, std::uint64_t seed,
                                    unsigned chains = 1) {
  if (samples < 1) throw InputError("samples must be >= 1");
  if (chains < 1) throw InputError("chains must be >= 1");
  spec.validate();
  const int r = w.ambient_rank();
  std::vector<detail::Moments> parts(chains);
  auto run_chain = [&](unsigned c) {
    const long long count = samples / chains + (static_cast<long long>(c) < samples % chains ? 1 : 0);
    Rng rng(chain_seed(seed, c));
    std::vector<Matrix> gens(static_cast<std::size_t>(r));
    for (long long s = 0; s < count; ++s) {
      for (auto& g : gens) g = haar_element(spec, rng);
      parts[c].add(evaluate_word(w, gens).trace());
    }
  };
  if (chains == 1) {
    run_chain(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned c = 0; c < chains; ++c) pool.emplace_back(run_chain, c);
    for (auto& t : pool) t.join();
  }
  detail::Moments total;
  for (const auto& p : parts) total.merge(p);

  TraceEstimate est;
  est.mean = {total.mean_re, total.mean_im};
  est.samples = total.n;
  est.seed = seed;
  est.chains = chains;
  if (total.n > 1) {
    const auto n = static_cast<double>(total.n);
    est.stderr_re = std::sqrt(total.m2_re / (n - 1)) / std::sqrt(n);
    est.stderr_im = std::sqrt(total.m2_im / (n - 1)) / std::sqrt(n);
  }
  return est;
}

struct ExhaustiveOptions {
  /// Cap on the group-tuple count (m^N * N!)^r.
  double max_tuples = 1e8;
  unsigned threads = 1;

  static ExhaustiveOptions from_environment() {
    ExhaustiveOptions o;
    if (const char* cap = std::getenv("WM_EXHAUSTIVE_CAP")) {
      char* end = nullptr;
      o.max_tuples = std::strtod(cap, &end);
      if (end == cap || o.max_tuples <= 0) throw InputError(std::string("WM_EXHAUSTIVE_CAP is not a positive number: ") + cap);
    }
    return o;
  }
};

namespace detail {

struct PermutationTable {
  explicit PermutationTable(int n) : n(n) {
    std::vector<int> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
    do {
      forward.push_back(p);
      std::vector<int> inv(p.size());
      for (int i = 0; i < n; ++i) inv[static_cast<std::size_t>(p[static_cast<std::size_t>(i)])] = i;
      backward.push_back(std::move(inv));
    } while (std::next_permutation(p.begin(), p.end()));
  }
  int n;
  std::vector<std::vector<int>> forward;
  std::vector<std::vector<int>> backward;
};

inline void check_cap(double tuples, const ExhaustiveOptions& opts) {
  if (!(tuples <= opts.max_tuples))
    throw CapExceeded("exhaustive enumeration over " + std::to_string(tuples) + " group tuples exceeds the cap of " +
                      std::to_string(opts.max_tuples) + " (set WM_EXHAUSTIVE_CAP to raise it)");
}

// Calls visit(tuple_of_permutation_indices) for every tuple in S_N^r and
// sums the returned counts. The outermost index is split across threads;
// integer sums make the result independent of the split.
template <typename Visit>
long long for_each_tuple(const PermutationTable& table, int r, unsigned threads, Visit visit) {
  const auto order = static_cast<long long>(table.forward.size());
  auto range = [&](long long lo, long long hi) {
    long long count = 0;
    std::vector<std::size_t> idx(static_cast<std::size_t>(r), 0);
    for (long long first = lo; first < hi; ++first) {
      idx[0] = static_cast<std::size_t>(first);
      std::fill(idx.begin() + 1, idx.end(), 0);
      for (;;) {
        count += visit(idx);
        std::size_t k = 1;
        while (k < idx.size() && ++idx[k] == static_cast<std::size_t>(order)) idx[k++] = 0;
        if (k >= idx.size()) break;
      }
    }
    return count;
  };
  if (threads <= 1 || order < 2) return range(0, order);
  std::vector<long long> partial(threads, 0);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      partial[t] = range(order * t / threads, order * (t + 1) / threads);
    });
  for (auto& th : pool) th.join();
  long long total = 0;
  for (long long p : partial) total += p;
  return total;
}

inline double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace detail

/// Exact E[tr w(A_1..A_r)] over all of (C_m wr S_N)^r (m = 1 gives S_N).
/// Phases are integrated per monomial: a closed path contributes 1 iff every
/// matrix entry it uses has signed multiplicity divisible by m.
inline mpq_class exhaustive_trace(const Word& w, unsigned m, int n, const ExhaustiveOptions& opts = {}) {
  if (m < 1) throw InputError("exhaustive_trace needs a finite m >= 1");
  if (n < 1) throw InputError("dimension must be >= 1");
  const int r = w.ambient_rank();
  detail::check_cap(std::pow(std::pow(static_cast<double>(m), n) * detail::factorial(n), r), opts);
  const detail::PermutationTable table(n);
  const auto& letters = w.letters();
  const long long hits = detail::for_each_tuple(table, r, opts.threads, [&](const std::vector<std::size_t>& idx) {
    long long count = 0;
    std::vector<long long> mult(static_cast<std::size_t>(r * n));
    for (int start = 0; start < n; ++start) {
      std::fill(mult.begin(), mult.end(), 0);
      int cur = start;
      for (const Letter& l : letters) {
        const auto g = static_cast<std::size_t>(l.gen - 1);
        if (l.sign > 0) {
          ++mult[g * static_cast<std::size_t>(n) + static_cast<std::size_t>(cur)];
          cur = table.forward[idx[g]][static_cast<std::size_t>(cur)];
        } else {
          cur = table.backward[idx[g]][static_cast<std::size_t>(cur)];
          --mult[g * static_cast<std::size_t>(n) + static_cast<std::size_t>(cur)];
        }
      }
      if (cur != start) continue;
      if (std::all_of(mult.begin(), mult.end(), [m](long long c) { return c % static_cast<long long>(m) == 0; }))
        ++count;
    }
    return count;
  });
  mpz_class tuples = 1;
  for (int i = 0; i < r; ++i) tuples *= static_cast<unsigned long>(table.forward.size());
  mpq_class result(mpz_class(static_cast<long>(hits)), tuples);
  result.canonicalize();
  return result;
}

/// Exact expected number of points of {1..N} fixed by every generator image
/// under a uniform phi in Hom(F_r, S_N).
inline mpq_class exhaustive_common_fixed_points(const std::vector<Word>& gens, int n, const ExhaustiveOptions& opts = {}) {
  int r = 1;
  for (const Word& g : gens) r = std::max(r, g.ambient_rank());
  detail::check_cap(std::pow(detail::factorial(n), r), opts);
  const detail::PermutationTable table(n);
  const long long hits = detail::for_each_tuple(table, r, opts.threads, [&](const std::vector<std::size_t>& idx) {
    long long count = 0;
    for (int start = 0; start < n; ++start) {
      bool fixed = true;
      for (const Word& g : gens) {
        int cur = start;
        for (const Letter& l : g.letters()) {
          const auto k = static_cast<std::size_t>(l.gen - 1);
          cur = l.sign > 0 ? table.forward[idx[k]][static_cast<std::size_t>(cur)] : table.backward[idx[k]][static_cast<std::size_t>(cur)];
        }
        if (cur != start) {
          fixed = false;
          break;
        }
      }
      if (fixed) ++count;
    }
    return count;
  });
  mpz_class tuples = 1;
  for (int i = 0; i < r; ++i) tuples *= static_cast<unsigned long>(table.forward.size());
  mpq_class result(mpz_class(static_cast<long>(hits)), tuples);
  result.canonicalize();
  return result;
}

/// The full w-measure on S_N: how often each permutation (as the image
/// vector j -> w(j)) is hit over all of S_N^r.
inline std::map<std::vector<int>, long long> exhaustive_distribution(const Word& w, int n, const ExhaustiveOptions& opts = {}) {
  const int r = w.ambient_rank();
  detail::check_cap(std::pow(detail::factorial(n), r), opts);
  const detail::PermutationTable table(n);
  std::map<std::vector<int>, long long> dist;
  detail::for_each_tuple(table, r, 1, [&](const std::vector<std::size_t>& idx) {
    std::vector<int> image(static_cast<std::size_t>(n));
    for (int start = 0; start < n; ++start) {
      int cur = start;
      for (const Letter& l : w.letters()) {
        const auto k = static_cast<std::size_t>(l.gen - 1);
        cur = l.sign > 0 ? table.forward[idx[k]][static_cast<std::size_t>(cur)] : table.backward[idx[k]][static_cast<std::size_t>(cur)];
      }
      image[static_cast<std::size_t>(start)] = cur;
    }
    ++dist[image];
    return 0LL;
  });
  return dist;
}

enum class S3Irrep { Trivial, Sign, Standard };

/// Exact average of an irreducible character of S_3 under the w-measure,
/// over all 6^r tuples.
inline mpq_class s3_character_expectation(const Word& w, S3Irrep irrep) {
  const int r = w.ambient_rank();
  if (r > 6) throw InputError("s3_character_expectation supports at most 6 generators");
  // Character values on the classes e, transpositions, 3-cycles.
  static constexpr int kTable[3][3] = {{1, 1, 1}, {1, -1, 1}, {2, 0, -1}};
  const int* row = kTable[static_cast<int>(irrep)];
  const detail::PermutationTable table(3);
  const long long total = detail::for_each_tuple(table, r, 1, [&](const std::vector<std::size_t>& idx) {
    int fixed = 0;
    for (int start = 0; start < 3; ++start) {
      int cur = start;
      for (const Letter& l : w.letters()) {
        const auto k = static_cast<std::size_t>(l.gen - 1);
        cur = l.sign > 0 ? table.forward[idx[k]][static_cast<std::size_t>(cur)] : table.backward[idx[k]][static_cast<std::size_t>(cur)];
      }
      if (cur == start) ++fixed;
    }
    const int cls = fixed == 3 ? 0 : (fixed == 1 ? 1 : 2);
    return static_cast<long long>(row[cls]);
  });
  mpz_class tuples = 1;
  for (int i = 0; i < r; ++i) tuples *= 6;
  mpq_class result(mpz_class(static_cast<long>(total)), tuples);
  result.canonicalize();
  return result;
}

}  // namespace wm
