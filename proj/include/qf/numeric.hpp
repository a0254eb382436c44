#ifndef QF_NUMERIC_HPP
#define QF_NUMERIC_HPP

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "qf/error.hpp"

namespace qf {

using Int = mpz_class;

inline Int gcd(const Int& a, const Int& b) {
  Int g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline Int isqrt(const Int& n) {
  Int r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

inline bool is_perfect_square(const Int& n) {
  return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

inline Int pow_ui(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

inline Int powm(const Int& base, const Int& e, const Int& mod) {
  Int r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), e.get_mpz_t(), mod.get_mpz_t());
  return r;
}

namespace detail {

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, a, m);
    a = mulmod_u64(a, a, m);
    e >>= 1;
  }
  return r;
}

// Deterministic Miller-Rabin for n < 2^64 with the 12-witness set.
inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                          23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                          23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

}  // namespace detail

enum class Primality { Composite, Prime, ProbablePrime };

/// Deterministic below 2^64; BPSW-style compound test (via GMP) above,
/// reported as ProbablePrime.
inline Primality primality(const Int& n) {
  if (n < 2) return Primality::Composite;
  if (mpz_fits_ulong_p(n.get_mpz_t()) && sizeof(unsigned long) == 8) {
    return detail::is_prime_u64(n.get_ui()) ? Primality::Prime
                                            : Primality::Composite;
  }
  int r = mpz_probab_prime_p(n.get_mpz_t(), 32);
  if (r == 0) return Primality::Composite;
  if (r == 2) return Primality::Prime;
  return Primality::ProbablePrime;
}

inline bool is_prime(const Int& n) { return primality(n) != Primality::Composite; }

/// Exponent map {prime -> multiplicity}, primes ascending.
using Factorization = std::map<Int, unsigned>;

namespace detail {

// Brent's cycle variant of Pollard rho. Deterministic: the increment c is
// stepped on failure inside the shared iteration budget.
inline std::optional<Int> rho_factor(const Int& n, unsigned long budget) {
  if (mpz_even_p(n.get_mpz_t())) return Int(2);
  unsigned long spent = 0;
  for (unsigned long c = 1; spent < budget; ++c) {
    Int y = 2, ys = 2, q = 1, g = 1, x = 2;
    unsigned long r = 1;
    const unsigned long batch = 128;
    while (g == 1 && spent < budget) {
      x = y;
      for (unsigned long i = 0; i < r; ++i) y = (y * y + c) % n;
      for (unsigned long k = 0; k < r && g == 1 && spent < budget; k += batch) {
        ys = y;
        unsigned long lim = std::min(batch, r - k);
        for (unsigned long i = 0; i < lim; ++i) {
          y = (y * y + c) % n;
          q = q * abs(x - y) % n;
        }
        spent += lim;
        g = gcd(q, n);
      }
      r *= 2;
    }
    if (g == n) {
      // Batched gcd overshot; replay one step at a time.
      do {
        ys = (ys * ys + c) % n;
        g = gcd(abs(x - ys), n);
      } while (g == 1);
    }
    if (g != 1 && g != n) return g;
  }
  return std::nullopt;
}

inline void factor_into(const Int& n, Factorization& out, unsigned long trial_bound,
                        unsigned long rho_budget) {
  if (n == 1) return;
  if (is_prime(n)) {
    ++out[n];
    return;
  }
  std::optional<Int> f = rho_factor(n, rho_budget);
  if (!f) {
    // Last resort: finish the trial-division range before giving up.
    Int m = n;
    for (unsigned long p = 2; p <= trial_bound && m > 1; p += (p == 2 ? 1 : 2)) {
      while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
        ++out[Int(p)];
        m /= p;
      }
      if (Int(p) * p > m) break;
    }
    if (m == n) throw Error(ErrorKind::FactorizationFailure,
                            "could not factor " + n.get_str());
    if (m > 1) factor_into(m, out, trial_bound, rho_budget);
    return;
  }
  factor_into(*f, out, trial_bound, rho_budget);
  factor_into(n / *f, out, trial_bound, rho_budget);
}

}  // namespace detail

struct FactorEffort {
  unsigned long trial_bound = 1000000;  // trial division ceiling
  unsigned long rho_budget = 100000;    // rho iterations per cofactor
};

/// Full factorization by trial division then Brent rho on the cofactors.
/// Throws FactorizationFailure if a composite survives the effort bound.
inline Factorization factor(Int n, FactorEffort effort = {}) {
  if (n < 1) throw Error(ErrorKind::FactorizationFailure, "factor: n must be >= 1");
  Factorization out;
  if (n == 1) return out;
  for (unsigned long p : {2ul, 3ul, 5ul, 7ul, 11ul, 13ul}) {
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      ++out[Int(p)];
      n /= p;
    }
  }
  unsigned long quick = std::min(effort.trial_bound, 10000ul);
  for (unsigned long p = 17; n > 1 && p <= quick; p += 2) {
    if (Int(p) * p > n) break;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      ++out[Int(p)];
      n /= p;
    }
  }
  if (n > 1) detail::factor_into(n, out, effort.trial_bound, effort.rho_budget);
  return out;
}

/// All positive divisors, ascending.
inline std::vector<Int> divisors(const Int& n, FactorEffort effort = {}) {
  std::vector<Int> ds{1};
  for (const auto& [p, e] : factor(n, effort)) {
    std::size_t base = ds.size();
    Int pk = 1;
    for (unsigned i = 1; i <= e; ++i) {
      pk *= p;
      for (std::size_t j = 0; j < base; ++j) ds.push_back(ds[j] * pk);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

struct SquarefreeParts {
  Int m;  // cofactor, N = m^2 * d
  Int d;  // squarefree part
};

/// N = m^2 * d with d squarefree, via full factorization.
inline SquarefreeParts squarefree_decompose(const Int& N, FactorEffort effort = {}) {
  if (N < 1) throw Error(ErrorKind::FactorizationFailure,
                         "squarefree_decompose: N must be >= 1");
  SquarefreeParts parts{1, 1};
  for (const auto& [p, e] : factor(N, effort)) {
    if (e / 2 > 0) parts.m *= pow_ui(p, e / 2);
    if (e % 2 == 1) parts.d *= p;
  }
  return parts;
}

inline bool is_squarefree(const Int& n, FactorEffort effort = {}) {
  for (const auto& [p, e] : factor(n, effort)) {
    if (e > 1) return false;
  }
  return true;
}

/// r >= 1 with p^r == value, if any. Requires p >= 2.
inline std::optional<unsigned long> power_exponent(const Int& value, const Int& p) {
  if (p < 2 || value < p) return std::nullopt;
  Int t = value;
  unsigned long r = 0;
  while (mpz_divisible_p(t.get_mpz_t(), p.get_mpz_t())) {
    t /= p;
    ++r;
  }
  if (t == 1 && r >= 1) return r;
  return std::nullopt;
}

}  // namespace qf

#endif  // QF_NUMERIC_HPP
