#pragma once

// Words in a free group F_r on generators x_1..x_r.

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wordmeasure/errors.hpp"

namespace wm {

struct Letter {
  int gen = 1;   // 1-based generator index
  int sign = 1;  // +1 or -1

  [[nodiscard]] constexpr Letter inverse() const { return {gen, -sign}; }
  friend constexpr bool operator==(Letter, Letter) = default;
  friend constexpr auto operator<=>(Letter, Letter) = default;
};

/// m in Z>=1 or infinity. m = 1 is the symmetric group, infinity is the
/// circle wreath product (commutator kernel).
class Modulus {
 public:
  constexpr Modulus() = default;
  constexpr explicit Modulus(unsigned m) : value_(m) {
    if (m == 0) throw std::invalid_argument("modulus must be >= 1");
  }
  static constexpr Modulus infinity() { return Modulus(kInfinity, 0); }

  [[nodiscard]] constexpr bool is_infinite() const { return value_ == kInfinity; }
  [[nodiscard]] constexpr unsigned value() const { return value_; }

  /// True iff `count` is a multiple of m (zero when m is infinite).
  [[nodiscard]] constexpr bool divides(long long count) const {
    if (is_infinite()) return count == 0;
    return count % static_cast<long long>(value_) == 0;
  }

  [[nodiscard]] std::string to_string() const {
    return is_infinite() ? std::string("inf") : std::to_string(value_);
  }

  /// Accepts a positive integer or "inf".
  static Modulus parse(std::string_view text) {
    if (text == "inf" || text == "infinity") return infinity();
    if (text.empty() || text.size() > 9 ||
        !std::all_of(text.begin(), text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      throw InputError("modulus must be a positive integer or 'inf': '" + std::string(text) + "'");
    const auto m = static_cast<unsigned>(std::stoul(std::string(text)));
    if (m == 0) throw InputError("modulus must be >= 1");
    return Modulus(m);
  }

  friend constexpr bool operator==(Modulus, Modulus) = default;

 private:
  static constexpr unsigned kInfinity = std::numeric_limits<unsigned>::max();
  constexpr Modulus(unsigned v, int) : value_(v) {}
  unsigned value_ = 1;
};

/// A freely reduced word. Construction always reduces.
class Word {
 public:
  Word() = default;

  Word(std::vector<Letter> letters, int ambient_rank) : rank_(ambient_rank) {
    if (ambient_rank < 1) throw std::invalid_argument("ambient rank must be >= 1");
    letters_.reserve(letters.size());
    for (const Letter& l : letters) {
      if (l.gen < 1 || l.gen > ambient_rank)
        throw std::invalid_argument("generator index " + std::to_string(l.gen) + " exceeds ambient rank " +
                                    std::to_string(ambient_rank));
      if (l.sign != 1 && l.sign != -1) throw std::invalid_argument("letter sign must be +1 or -1");
      if (!letters_.empty() && letters_.back() == l.inverse())
        letters_.pop_back();
      else
        letters_.push_back(l);
    }
  }

  [[nodiscard]] const std::vector<Letter>& letters() const { return letters_; }
  [[nodiscard]] int ambient_rank() const { return rank_; }
  [[nodiscard]] std::size_t size() const { return letters_.size(); }
  [[nodiscard]] bool empty() const { return letters_.empty(); }
  [[nodiscard]] const Letter& operator[](std::size_t i) const { return letters_[i]; }

  [[nodiscard]] Word inverse() const {
    std::vector<Letter> inv;
    inv.reserve(letters_.size());
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) inv.push_back(it->inverse());
    return Word(std::move(inv), rank_);
  }

  /// Same letters viewed in a free group of larger rank.
  [[nodiscard]] Word with_rank(int rank) const { return Word(letters_, rank); }

  friend Word operator*(const Word& a, const Word& b) {
    std::vector<Letter> cat = a.letters_;
    cat.insert(cat.end(), b.letters_.begin(), b.letters_.end());
    return Word(std::move(cat), std::max(a.rank_, b.rank_));
  }

  friend bool operator==(const Word& a, const Word& b) { return a.letters_ == b.letters_; }

 private:
  std::vector<Letter> letters_;
  int rank_ = 1;
};

namespace detail {

// Single-letter alphabet: x, y, z first, then a..w, so that x,y,z are
// generators 1,2,3 and the remaining letters follow in alphabetical order.
inline constexpr std::string_view kAlphabet = "xyzabcdefghijklmnopqrstuvw";

inline int letter_index(char lower) {
  const auto pos = kAlphabet.find(lower);
  return pos == std::string_view::npos ? 0 : static_cast<int>(pos) + 1;
}

}  // namespace detail

/// Parses a word. Two syntaxes, not mixable within one string:
///   single-letter: lowercase letter = generator, uppercase = inverse
///                  (x,y,z,a,b,...,w are generators 1..26);
///   numbered:      x3 / X3 for generator 3 and its inverse.
/// Whitespace is ignored; "" and "1" denote the identity. ambient_rank = 0
/// infers the rank as the largest generator index used (at least 1).
inline Word parse_word(std::string_view text, int ambient_rank = 0) {
  if (ambient_rank < 0) throw InputError("ambient rank must be >= 1");
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);

  std::vector<Letter> letters;
  if (s == "1") s.clear();
  const bool numbered = std::any_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  if (numbered) {
    std::size_t i = 0;
    while (i < s.size()) {
      const char c = s[i];
      if (c != 'x' && c != 'X')
        throw InputError("malformed numbered generator at position " + std::to_string(i) + " in '" + s +
                         "' (expected x<k> or X<k>; single-letter and numbered forms cannot be mixed)");
      std::size_t j = i + 1;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j == i + 1 || j - i - 1 > 6 || s[i + 1] == '0')
        throw InputError("malformed numbered generator at position " + std::to_string(i) + " in '" + s + "'");
      const int gen = std::stoi(s.substr(i + 1, j - i - 1));
      letters.push_back({gen, c == 'x' ? 1 : -1});
      i = j;
    }
  } else {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const char c = s[i];
      const int gen = detail::letter_index(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      if (gen == 0 || !std::isalpha(static_cast<unsigned char>(c)))
        throw InputError(std::string("unknown token '") + c + "' at position " + std::to_string(i));
      letters.push_back({gen, std::islower(static_cast<unsigned char>(c)) ? 1 : -1});
    }
  }

  int max_gen = 1;
  for (const Letter& l : letters) max_gen = std::max(max_gen, l.gen);
  if (ambient_rank == 0) ambient_rank = max_gen;
  if (max_gen > ambient_rank)
    throw InputError("generator index " + std::to_string(max_gen) + " exceeds ambient rank " +
                     std::to_string(ambient_rank));
  return Word(std::move(letters), ambient_rank);
}

/// Single-letter form when r <= 26, numbered form otherwise. The identity
/// serializes as "1".
inline std::string to_string(const Word& w) {
  if (w.empty()) return "1";
  std::string out;
  if (w.ambient_rank() <= 26) {
    for (const Letter& l : w.letters()) {
      const char c = detail::kAlphabet[static_cast<std::size_t>(l.gen - 1)];
      out.push_back(l.sign > 0 ? c : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
  } else {
    for (const Letter& l : w.letters()) {
      out.push_back(l.sign > 0 ? 'x' : 'X');
      out += std::to_string(l.gen);
    }
  }
  return out;
}

struct CyclicReduction {
  Word reduced;     // cyclically reduced core w'
  Word conjugator;  // u with w = u w' u^-1
};

inline CyclicReduction cyclic_reduce(const Word& w) {
  const auto& ls = w.letters();
  std::size_t lo = 0;
  std::size_t hi = ls.size();
  while (hi - lo >= 2 && ls[lo] == ls[hi - 1].inverse()) {
    ++lo;
    --hi;
  }
  std::vector<Letter> core(ls.begin() + static_cast<std::ptrdiff_t>(lo), ls.begin() + static_cast<std::ptrdiff_t>(hi));
  std::vector<Letter> u(ls.begin(), ls.begin() + static_cast<std::ptrdiff_t>(lo));
  return {Word(std::move(core), w.ambient_rank()), Word(std::move(u), w.ambient_rank())};
}

[[nodiscard]] inline bool is_cyclically_reduced(const Word& w) {
  return w.size() < 2 || w.letters().front() != w.letters().back().inverse();
}

/// Image of w in Z^r.
inline std::vector<long long> exponent_vector(const Word& w) {
  std::vector<long long> v(static_cast<std::size_t>(w.ambient_rank()), 0);
  for (const Letter& l : w.letters()) v[static_cast<std::size_t>(l.gen - 1)] += l.sign;
  return v;
}

/// w in K_m(F_r): every total exponent is divisible by m.
inline bool ambient_km_member(const Word& w, Modulus m) {
  const auto v = exponent_vector(w);
  return std::all_of(v.begin(), v.end(), [m](long long e) { return m.divides(e); });
}

/// [x_1,y_1]...[x_g,y_g] on generators 1..2g.
inline Word orientable_surface_word(int genus) {
  std::vector<Letter> ls;
  for (int k = 0; k < genus; ++k) {
    const int a = 2 * k + 1;
    const int b = 2 * k + 2;
    ls.insert(ls.end(), {{a, 1}, {b, 1}, {a, -1}, {b, -1}});
  }
  return Word(std::move(ls), std::max(1, 2 * genus));
}

/// x_1^2...x_g^2.
inline Word nonorientable_surface_word(int genus) {
  std::vector<Letter> ls;
  for (int k = 1; k <= genus; ++k) ls.insert(ls.end(), {{k, 1}, {k, 1}});
  return Word(std::move(ls), std::max(1, genus));
}

}  // namespace wm
