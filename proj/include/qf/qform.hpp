#ifndef QF_QFORM_HPP
#define QF_QFORM_HPP

#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "qf/numeric.hpp"

namespace qf {

inline const Int kDefaultEnumerationBound = 100000000;  // |D| cap

/// Primitive positive-definite integral binary quadratic form
/// a x^2 + b xy + c y^2 with b^2 - 4ac < 0.
struct QForm {
  Int a, b, c;

  Int discriminant() const { return b * b - 4 * a * c; }

  bool is_reduced() const {
    if (!(abs(b) <= a && a <= c)) return false;
    if ((abs(b) == a || a == c) && b < 0) return false;
    return true;
  }

  /// Checked constructor for externally supplied coefficients.
  static QForm make(Int a, Int b, Int c) {
    QForm f{std::move(a), std::move(b), std::move(c)};
    if (f.a <= 0)
      throw Error(ErrorKind::InvalidForm, "form must have a > 0");
    if (f.discriminant() >= 0)
      throw Error(ErrorKind::InvalidForm, "form must have negative discriminant");
    if (gcd(gcd(f.a, f.b), f.c) != 1)
      throw Error(ErrorKind::InvalidForm, "form must be primitive");
    return f;
  }

  QForm inverse() const { return {a, -b, c}; }

  friend bool operator==(const QForm&, const QForm&) = default;
  friend bool operator<(const QForm& x, const QForm& y) {
    return std::tie(x.a, x.b, x.c) < std::tie(y.a, y.b, y.c);
  }
  friend std::ostream& operator<<(std::ostream& os, const QForm& f) {
    return os << "(" << f.a << ", " << f.b << ", " << f.c << ")";
  }
};

/// Fundamental negative discriminant.
class Discriminant {
 public:
  static Discriminant make(Int D) {
    if (D >= 0)
      throw Error(ErrorKind::InvalidDiscriminant, "discriminant must be negative");
    unsigned long r = mpz_fdiv_ui(D.get_mpz_t(), 4);
    if (r != 0 && r != 1)
      throw Error(ErrorKind::InvalidDiscriminant,
                  "discriminant must be 0 or 1 mod 4");
    if (r == 1) {
      if (!is_squarefree(-D))
        throw Error(ErrorKind::InvalidDiscriminant,
                    "discriminant 1 mod 4 must be squarefree");
    } else {
      Int e = D / 4;
      unsigned long e4 = mpz_fdiv_ui(e.get_mpz_t(), 4);
      if ((e4 != 2 && e4 != 3) || !is_squarefree(-e))
        throw Error(ErrorKind::InvalidDiscriminant,
                    "D = 4e needs e squarefree and e = 2 or 3 mod 4");
    }
    return Discriminant(std::move(D));
  }

  const Int& value() const { return D_; }

  friend bool operator==(const Discriminant&, const Discriminant&) = default;

 private:
  explicit Discriminant(Int D) : D_(std::move(D)) {}
  Int D_;
};

/// Fundamental discriminant of Q(sqrt(-d)) for squarefree d > 0:
/// -d if d = 3 mod 4, else -4d.
inline Discriminant fundamental_discriminant_for(const Int& d) {
  if (d <= 0 || !is_squarefree(d))
    throw Error(ErrorKind::InvalidDiscriminant, "d must be positive squarefree");
  if (mpz_fdiv_ui(d.get_mpz_t(), 4) == 3) return Discriminant::make(-d);
  return Discriminant::make(-4 * d);
}

/// Principal form of any negative discriminant: (1, 0, -D/4) for even D,
/// (1, 1, (1-D)/4) for odd D.
inline QForm principal_form(const Int& D) {
  if (D >= 0 || (mpz_fdiv_ui(D.get_mpz_t(), 4) != 0 &&
                 mpz_fdiv_ui(D.get_mpz_t(), 4) != 1))
    throw Error(ErrorKind::InvalidDiscriminant,
                "principal form needs D < 0 with D = 0 or 1 mod 4");
  if (mpz_even_p(D.get_mpz_t())) return {1, 0, -D / 4};
  return {1, 1, (1 - D) / 4};
}

inline QForm identity(const Discriminant& D) { return principal_form(D.value()); }

inline QForm identity_like(const QForm& f) { return principal_form(f.discriminant()); }

namespace detail {

// Bring b into (-a, a], adjusting c to keep the discriminant.
inline void normalize(QForm& f) {
  Int q;
  Int num = f.b + f.a - 1;
  Int den = 2 * f.a;
  mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  if (q != 0) {
    f.c += f.a * q * q - f.b * q;
    f.b -= 2 * f.a * q;
  }
}

inline void rho_step(QForm& f) {
  std::swap(f.a, f.c);
  f.b = -f.b;
  normalize(f);
}

}  // namespace detail

/// Unique reduced representative of the class of f:
/// |b| <= a <= c with b >= 0 when |b| = a or a = c.
inline QForm reduce(QForm f) {
  detail::normalize(f);
  while (f.a > f.c) detail::rho_step(f);
  if (f.a == f.c && f.b < 0) f.b = -f.b;
  return f;
}

/// Dirichlet composition with gcd cancellation; returns the reduced
/// representative of the composite class.
inline QForm compose(const QForm& f1, const QForm& f2) {
  Int D = f1.discriminant();
  if (D != f2.discriminant())
    throw Error(ErrorKind::DiscriminantMismatch,
                "compose: discriminants differ");
  Int s = (f1.b + f2.b) / 2;
  Int g, u0, v0;
  mpz_gcdext(g.get_mpz_t(), u0.get_mpz_t(), v0.get_mpz_t(), f1.a.get_mpz_t(),
             f2.a.get_mpz_t());
  Int e, v1, w;
  mpz_gcdext(e.get_mpz_t(), v1.get_mpz_t(), w.get_mpz_t(), g.get_mpz_t(),
             s.get_mpz_t());
  Int v = v0 * v1;
  Int a2e = f2.a / e;
  QForm r;
  r.a = f1.a / e * a2e;
  r.b = f2.b + 2 * a2e * (v * (s - f2.b) - w * f2.c);
  r.c = (r.b * r.b - D) / (4 * r.a);
  return reduce(r);
}

/// Reduced e-th power class by square-and-multiply; e = 0 gives the identity.
inline QForm pow_class(const QForm& f, const Int& e) {
  if (e < 0) throw Error(ErrorKind::InvalidForm, "pow_class: negative exponent");
  QForm acc = identity_like(f);
  if (e == 0) return acc;
  QForm g = reduce(f);
  for (std::size_t i = mpz_sizeinbase(e.get_mpz_t(), 2); i-- > 0;) {
    acc = compose(acc, acc);
    if (mpz_tstbit(e.get_mpz_t(), i)) acc = compose(acc, g);
  }
  return acc;
}

/// Full set of reduced primitive forms of one fundamental discriminant.
struct ClassGroup {
  Discriminant D;
  std::vector<QForm> reduced_forms;  // sorted by (a, b, c)

  std::size_t h() const { return reduced_forms.size(); }
};

/// Exhaustive scan: a from 1 to sqrt(|D|/3), |b| <= a with b = D mod 2,
/// 4a | b^2 - D, a <= c, primitive, boundary signs skipped.
inline ClassGroup enumerate_class_group(const Discriminant& D,
                                        const Int& bound = kDefaultEnumerationBound) {
  if (-D.value() > bound)
    throw Error(ErrorKind::BoundExceeded,
                "enumerate_class_group: |D| exceeds bound " + bound.get_str());
  ClassGroup G{D, {}};
  Int amax = isqrt(-D.value() / 3);
  bool odd = mpz_odd_p(D.value().get_mpz_t()) != 0;
  for (Int a = 1; a <= amax; ++a) {
    Int fa = 4 * a;
    for (Int b = odd ? 1 : 0; b <= a; b += 2) {
      Int t = b * b - D.value();
      if (!mpz_divisible_p(t.get_mpz_t(), fa.get_mpz_t())) continue;
      Int c = t / fa;
      if (c < a) continue;
      if (gcd(gcd(a, b), c) != 1) continue;
      G.reduced_forms.push_back({a, b, c});
      if (b != 0 && b != a && a != c) G.reduced_forms.push_back({a, -b, c});
    }
  }
  std::sort(G.reduced_forms.begin(), G.reduced_forms.end());
  return G;
}

namespace detail {

// Exact order given a multiple of it: peel primes off the exponent.
inline Int order_from_multiple(const QForm& f, Int multiple) {
  QForm id = identity_like(f);
  Int ord = std::move(multiple);
  for (const auto& [q, e] : factor(ord)) {
    for (unsigned i = 0; i < e; ++i) {
      if (mpz_divisible_p(ord.get_mpz_t(), q.get_mpz_t()) &&
          pow_class(f, ord / q) == id) {
        ord /= q;
      } else {
        break;
      }
    }
  }
  return ord;
}

}  // namespace detail

/// Least e >= 1 with f^e principal, via the class number of the enumerated
/// group; BoundExceeded propagates from enumeration.
inline Int class_order(const QForm& f, const Int& enumeration_bound = kDefaultEnumerationBound) {
  Discriminant D = Discriminant::make(f.discriminant());
  ClassGroup G = enumerate_class_group(D, enumeration_bound);
  return detail::order_from_multiple(f, Int(static_cast<unsigned long>(G.h())));
}

/// Exact order when it divides exponent_bound, else nullopt. This is the
/// cheap path when a caller already knows a multiple candidate.
inline std::optional<Int> order_dividing(const QForm& f, const Int& exponent_bound) {
  if (exponent_bound < 1) return std::nullopt;
  QForm id = identity_like(f);
  if (pow_class(f, exponent_bound) != id) return std::nullopt;
  return detail::order_from_multiple(f, exponent_bound);
}

}  // namespace qf

#endif  // QF_QFORM_HPP
