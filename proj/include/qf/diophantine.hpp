#ifndef QF_DIOPHANTINE_HPP
#define QF_DIOPHANTINE_HPP

#include <array>
#include <optional>
#include <vector>

#include "qf/numeric.hpp"

namespace qf {

/// Exact Fibonacci number F_l (F_0 = 0, F_1 = 1).
inline Int fibonacci(unsigned long l) {
  Int r;
  mpz_fib_ui(r.get_mpz_t(), l);
  return r;
}

/// Exact Lucas number L_l (L_0 = 2, L_1 = 1).
inline Int lucas(unsigned long l) {
  Int r;
  mpz_lucnum_ui(r.get_mpz_t(), l);
  return r;
}

struct DioSolution {
  Int x;
  unsigned long y = 0;

  friend bool operator==(const DioSolution&, const DioSolution&) = default;
};

/// All (x, y) with d x^2 + k^2 = p^y, 1 <= y <= y_max, ascending y.
/// Total: callers are expected to pass d >= 2, k >= 1 and an odd prime p,
/// but off-contract inputs just yield the solutions of whatever equation
/// they name.
inline std::vector<DioSolution> solve_eq1(const Int& d, const Int& k, const Int& p,
                                          unsigned long y_max) {
  std::vector<DioSolution> out;
  if (d < 1) return out;
  Int kk = k * k;
  Int py = 1;
  for (unsigned long y = 1; y <= y_max; ++y) {
    py *= p;
    Int t = py - kk;
    if (t <= 0) continue;
    if (!mpz_divisible_p(t.get_mpz_t(), d.get_mpz_t())) continue;
    Int xx = t / d;
    if (!is_perfect_square(xx)) continue;
    out.push_back({isqrt(xx), y});
  }
  return out;
}

struct FWitness {
  unsigned long l = 0;
  int eps = 0;  // +1 or -1

  friend bool operator==(const FWitness&, const FWitness&) = default;
};

/// Membership in F = {(F_{l-2e}, L_{l+e}, F_l) : l >= 2, e = +-1}; the search
/// stops once F_l exceeds p.
inline std::optional<FWitness> in_set_F(const Int& D1, const Int& D2, const Int& p) {
  if (p < 1 || D1 < 1 || D2 < 1) return std::nullopt;
  for (unsigned long l = 2;; ++l) {
    Int fl = fibonacci(l);
    if (fl > p) break;
    if (fl != p) continue;
    for (int eps : {-1, +1}) {
      long idx = static_cast<long>(l) - 2 * eps;
      if (idx < 0) continue;
      unsigned long lpe = static_cast<unsigned long>(static_cast<long>(l) + eps);
      if (fibonacci(static_cast<unsigned long>(idx)) == D1 && lucas(lpe) == D2)
        return FWitness{l, eps};
    }
  }
  return std::nullopt;
}

/// Membership in G = {(1, 4p^r - 1, p) : r >= 1}.
inline std::optional<unsigned long> in_set_G(const Int& D1, const Int& D2,
                                             const Int& p) {
  if (D1 != 1 || D2 < 3 || p < 1) return std::nullopt;
  if (p == 1) return D2 == 3 ? std::optional<unsigned long>(1) : std::nullopt;
  Int pr = 1;
  for (unsigned long r = 1;; ++r) {
    pr *= p;
    Int t = 4 * pr - 1;
    if (t > D2) break;
    if (t == D2) return r;
  }
  return std::nullopt;
}

struct HWitness {
  unsigned long r = 0;
  Int s;

  friend bool operator==(const HWitness&, const HWitness&) = default;
};

/// Membership in H_lambda: positive r, s with D1 s^2 + D2 = lambda^2 p^r and
/// 3 D1 s^2 - D2 = +-lambda^2. The second identity pins s, so the search is
/// O(1); s_bound (0 = unbounded) caps the accepted s for interface parity.
inline std::optional<HWitness> in_set_H(const Int& D1, const Int& D2, const Int& p,
                                        int lambda_sq, const Int& s_bound = 0) {
  if (lambda_sq != 1 && lambda_sq != 2 && lambda_sq != 4)
    throw Error(ErrorKind::ConfigInvalid, "lambda_sq must be 1, 2 or 4");
  if (D1 < 1 || D2 < 1 || p < 2) return std::nullopt;
  std::optional<HWitness> best;
  const Int candidates[2] = {D2 + lambda_sq, D2 - lambda_sq};
  for (const Int& rhs : candidates) {
    if (rhs <= 0) continue;
    Int den = 3 * D1;
    if (!mpz_divisible_p(rhs.get_mpz_t(), den.get_mpz_t())) continue;
    Int ss = rhs / den;
    if (!is_perfect_square(ss)) continue;
    Int s = isqrt(ss);
    if (s < 1) continue;
    if (s_bound > 0 && s > s_bound) continue;
    Int lhs = D1 * ss + D2;
    if (!mpz_divisible_ui_p(lhs.get_mpz_t(), lambda_sq)) continue;
    std::optional<unsigned long> r = power_exponent(lhs / lambda_sq, p);
    if (!r) continue;
    HWitness w{*r, s};
    if (!best || w.r < best->r || (w.r == best->r && w.s < best->s)) best = w;
  }
  return best;
}

/// The seven sporadic tuples of the at-most-one-solution law, with lambda
/// stored as lambda^2 in {1, 2, 4}.
inline bool in_set_S(int lambda_sq, const Int& D1, const Int& D2, const Int& p) {
  struct Tuple {
    int lsq;
    long d1, d2, p;
  };
  static constexpr std::array<Tuple, 7> table{{{4, 13, 3, 2},
                                               {2, 7, 11, 3},
                                               {1, 2, 1, 3},
                                               {4, 7, 1, 2},
                                               {2, 1, 1, 5},
                                               {2, 1, 1, 13},
                                               {4, 1, 3, 7}}};
  for (const Tuple& t : table) {
    if (lambda_sq == t.lsq && D1 == t.d1 && D2 == t.d2 && p == t.p) return true;
  }
  return false;
}

/// x with (y^n - 1)/(y - 1) = x^2, if the quotient is a perfect square.
inline std::optional<Int> ljunggren_check(const Int& y, unsigned long n) {
  if (y <= 1 || n < 3 || n % 2 == 0)
    throw Error(ErrorKind::ConfigInvalid, "ljunggren_check needs y > 1, odd n >= 3");
  Int s = (pow_ui(y, n) - 1) / (y - 1);
  if (!is_perfect_square(s)) return std::nullopt;
  return isqrt(s);
}

/// Indices l <= l_max with L_l a perfect square.
inline std::vector<unsigned long> lucas_square_scan(unsigned long l_max) {
  std::vector<unsigned long> out;
  for (unsigned long l = 0; l <= l_max; ++l) {
    if (is_perfect_square(lucas(l))) out.push_back(l);
  }
  return out;
}

/// Membership verdicts for one (D1, D2, p) triple at a fixed lambda.
struct ExceptionReport {
  Int D1, D2, p;
  int lambda_sq = 1;
  bool in_S = false;
  std::optional<FWitness> in_F;
  std::optional<unsigned long> in_G;
  std::optional<HWitness> in_H;

  bool any() const { return in_S || in_F || in_G || in_H; }
};

inline ExceptionReport classify_exceptional(const Int& D1, const Int& D2,
                                            const Int& p, int lambda_sq,
                                            const Int& s_bound = 0) {
  ExceptionReport rep;
  rep.D1 = D1;
  rep.D2 = D2;
  rep.p = p;
  rep.lambda_sq = lambda_sq;
  rep.in_S = in_set_S(lambda_sq, D1, D2, p);
  rep.in_F = in_set_F(D1, D2, p);
  rep.in_G = in_set_G(D1, D2, p);
  rep.in_H = in_set_H(D1, D2, p, lambda_sq, s_bound);
  return rep;
}

enum class UniquenessVerdict { Consistent, Violation };

inline const char* to_string(UniquenessVerdict v) {
  return v == UniquenessVerdict::Consistent ? "CONSISTENT" : "VIOLATION";
}

struct VerdictRecord {
  Int d, k, p;
  unsigned long y_max = 0;
  std::vector<DioSolution> solutions;
  ExceptionReport report;  // on (d, k^2, p) with lambda = 1
  UniquenessVerdict verdict = UniquenessVerdict::Consistent;
};

/// Executable check that the solution count obeys the at-most-one law: more than one solution
/// is only tolerated when (d, k^2, p) lands in an exceptional set.
inline VerdictRecord at_most_one_verdict(const Int& d, const Int& k,
                                              const Int& p, unsigned long y_max) {
  VerdictRecord rec;
  rec.d = d;
  rec.k = k;
  rec.p = p;
  rec.y_max = y_max;
  rec.solutions = solve_eq1(d, k, p, y_max);
  rec.report = classify_exceptional(d, k * k, p, 1);
  rec.verdict = (rec.solutions.size() <= 1 || rec.report.any())
                    ? UniquenessVerdict::Consistent
                    : UniquenessVerdict::Violation;
  return rec;
}

}  // namespace qf

#endif  // QF_DIOPHANTINE_HPP
