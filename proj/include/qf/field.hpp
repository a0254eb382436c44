#ifndef QF_FIELD_HPP
#define QF_FIELD_HPP

#include <optional>
#include <ostream>
#include <utility>

#include "qf/numeric.hpp"
#include "qf/qform.hpp"

namespace qf {

/// Element of the ring of integers of Q(sqrt(-d)): x + y sqrt(-d), or
/// (x + y sqrt(-d))/2 when halved (d = 3 mod 4, x and y both odd).
struct AlgebraicInt {
  Int x, y, d;
  bool halved = false;

  static AlgebraicInt make(Int x, Int y, Int d, bool halved = false) {
    if (halved) {
      if (mpz_fdiv_ui(d.get_mpz_t(), 4) != 3)
        throw Error(ErrorKind::InvalidForm,
                    "half-integer coordinates need d = 3 mod 4");
      if (mpz_even_p(x.get_mpz_t()) || mpz_even_p(y.get_mpz_t()))
        throw Error(ErrorKind::InvalidForm,
                    "half-integer coordinates must both be odd");
    }
    return {std::move(x), std::move(y), std::move(d), halved};
  }

  static AlgebraicInt one(Int d) { return {1, 0, std::move(d), false}; }

  AlgebraicInt negated() const { return {-x, -y, d, halved}; }
  AlgebraicInt conjugate() const { return {x, -y, d, halved}; }

  friend bool operator==(const AlgebraicInt&, const AlgebraicInt&) = default;
  friend std::ostream& operator<<(std::ostream& os, const AlgebraicInt& z) {
    if (z.halved) os << "(";
    os << z.x;
    if (z.y >= 0) os << " + " << z.y;
    else os << " - " << -z.y;
    os << "*sqrt(-" << z.d << ")";
    if (z.halved) os << ")/2";
    return os;
  }
};

/// x^2 + y^2 d, divided by 4 for half-integer elements.
inline Int norm(const AlgebraicInt& z) {
  Int n = z.x * z.x + z.y * z.y * z.d;
  if (z.halved) n /= 4;
  return n;
}

namespace detail {

// Doubled coordinates (u, v) standing for (u + v sqrt(-d))/2; closed under
// multiplication inside the ring of integers.
struct Doubled {
  Int u, v;
};

inline Doubled to_doubled(const AlgebraicInt& z) {
  if (z.halved) return {z.x, z.y};
  return {2 * z.x, 2 * z.y};
}

inline AlgebraicInt from_doubled(Doubled w, const Int& d) {
  if (mpz_even_p(w.u.get_mpz_t()) && mpz_even_p(w.v.get_mpz_t()))
    return {w.u / 2, w.v / 2, d, false};
  return {std::move(w.u), std::move(w.v), d, true};
}

inline Doubled mul_doubled(const Doubled& a, const Doubled& b, const Int& d) {
  Int u = a.u * b.u - a.v * b.v * d;
  Int v = a.u * b.v + a.v * b.u;
  // Products of ring elements keep even doubled coordinates.
  return {u / 2, v / 2};
}

}  // namespace detail

inline AlgebraicInt mul(const AlgebraicInt& a, const AlgebraicInt& b) {
  if (a.d != b.d)
    throw Error(ErrorKind::InternalInvariantViolation,
                "mul: mixed ground fields");
  return detail::from_doubled(
      detail::mul_doubled(detail::to_doubled(a), detail::to_doubled(b), a.d), a.d);
}

/// e-th ring power; norm multiplicativity holds exactly.
inline AlgebraicInt alg_pow(const AlgebraicInt& z, unsigned long e) {
  AlgebraicInt acc = AlgebraicInt::one(z.d);
  AlgebraicInt base = z;
  while (e) {
    if (e & 1) acc = mul(acc, base);
    base = mul(base, base);
    e >>= 1;
  }
  return acc;
}

/// Validated instance of K_{k,p,n} = Q(sqrt(k^2 - p^n)): N = p^n - k^2 = m^2 d
/// with d squarefree > 3, D the fundamental discriminant of Q(sqrt(-d)).
struct FieldInstance {
  Int k;
  Int p;
  unsigned long n = 0;
  Int N;
  Int d;
  Int m;
  Int discriminant;  // fundamental: -d if d = 3 mod 4, else -4d
  bool p_probable_prime = false;

  AlgebraicInt alpha() const { return {k, m, d, false}; }
};

/// Validates (k, p, n) and derives every field; errors are the validation
/// verdicts: InvalidP, InvalidN, NotCoprime, SizeViolation, DegenerateField,
/// FactorizationFailure.
inline FieldInstance build_instance(const Int& k, const Int& p, long n,
                                    FactorEffort effort = {}) {
  if (k < 1)
    throw Error(ErrorKind::ConfigInvalid, "k must be a positive integer");
  Primality pr = (p >= 2) ? primality(p) : Primality::Composite;
  if (p < 3 || mpz_even_p(p.get_mpz_t()) || pr == Primality::Composite)
    throw Error(ErrorKind::InvalidP, "p must be an odd prime");
  if (n < 3 || n % 2 == 0)
    throw Error(ErrorKind::InvalidN, "n must be an odd integer >= 3");
  if (gcd(k, p) != 1)
    throw Error(ErrorKind::NotCoprime, "gcd(k, p) must be 1");
  FieldInstance inst;
  inst.k = k;
  inst.p = p;
  inst.n = static_cast<unsigned long>(n);
  inst.p_probable_prime = (pr == Primality::ProbablePrime);
  Int pn = pow_ui(p, inst.n);
  if (k * k >= pn)
    throw Error(ErrorKind::SizeViolation, "k^2 must be < p^n");
  inst.N = pn - k * k;
  SquarefreeParts parts = squarefree_decompose(inst.N, effort);
  inst.m = parts.m;
  inst.d = parts.d;
  if (inst.d <= 3)
    throw Error(ErrorKind::DegenerateField,
                "squarefree part d = " + inst.d.get_str() + " must exceed 3");
  inst.discriminant = (mpz_fdiv_ui(inst.d.get_mpz_t(), 4) == 3) ? Int(-inst.d)
                                                                : Int(-4 * inst.d);
  return inst;
}

/// Reduced form for the class of the degree-one prime above p, i.e. the ideal
/// (p, k + m sqrt(-d)). The canonical lift of b makes the output deterministic.
inline QForm ideal_above_p(const FieldInstance& inst) {
  Int minv;
  if (mpz_invert(minv.get_mpz_t(), inst.m.get_mpz_t(), inst.p.get_mpz_t()) == 0)
    throw Error(ErrorKind::InternalInvariantViolation, "m not invertible mod p");
  Int r = inst.k * minv % inst.p;  // r^2 = -d (mod p)
  if ((r * r + inst.d) % inst.p != 0)
    throw Error(ErrorKind::InternalInvariantViolation, "r^2 != -d mod p");
  Int b;
  if (mpz_even_p(inst.discriminant.get_mpz_t())) {
    b = 2 * r;                  // b = 2r mod 2p, even, in (0, 2p]
    if (b == 0) b = 2 * inst.p;
  } else {
    b = (inst.p - r) % inst.p;  // odd lift of -r into (0, 2p]
    if (mpz_even_p(b.get_mpz_t())) b += inst.p;
  }
  Int bb = b * b - inst.discriminant;
  Int fourp = 4 * inst.p;
  if (!mpz_divisible_p(bb.get_mpz_t(), fourp.get_mpz_t()))
    throw Error(ErrorKind::InternalInvariantViolation, "b^2 != D mod 4p");
  return reduce({inst.p, b, bb / fourp});
}

/// Exhaustive search for beta with beta^q = +-alpha; any such beta has norm
/// p^(n/q), so the scan runs over the doubled coordinate v with
/// u^2 + v^2 d = 4 p^(n/q).
inline std::optional<AlgebraicInt> qth_power_witness(const FieldInstance& inst,
                                                     unsigned long q) {
  if (q < 2 || !is_prime(Int(static_cast<long>(q))) || inst.n % q != 0)
    throw Error(ErrorKind::ConfigInvalid, "q must be a prime divisor of n");
  Int target = pow_ui(inst.p, inst.n / q);
  Int four_target = 4 * target;
  AlgebraicInt alpha = inst.alpha();
  AlgebraicInt neg_alpha = alpha.negated();
  bool half_ok = mpz_fdiv_ui(inst.d.get_mpz_t(), 4) == 3;
  for (Int v = 0; v * v * inst.d <= four_target; ++v) {
    Int uu = four_target - v * v * inst.d;
    if (!is_perfect_square(uu)) continue;
    Int u = isqrt(uu);
    bool u_odd = mpz_odd_p(u.get_mpz_t()) != 0;
    bool v_odd = mpz_odd_p(v.get_mpz_t()) != 0;
    if (u_odd != v_odd) continue;
    if (u_odd && !half_ok) continue;
    // Sign flips of the whole element are absorbed by comparing against
    // both alpha and -alpha; the conjugate is a distinct candidate.
    for (const Int& vv : {v, Int(-v)}) {
      AlgebraicInt beta = detail::from_doubled({u, vv}, inst.d);
      AlgebraicInt bq = alg_pow(beta, q);
      if (bq == alpha || bq == neg_alpha) return beta;
      if (vv == 0) break;
    }
  }
  return std::nullopt;
}

/// Instance-wise verdict that alpha is not a q-th power in the ring of
/// integers; true means a witness beta exists.
inline bool is_qth_power(const FieldInstance& inst, unsigned long q) {
  return qth_power_witness(inst, q).has_value();
}

}  // namespace qf

#endif  // QF_FIELD_HPP
