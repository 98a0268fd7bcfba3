#include "hochdef/scalar.hpp"

#include <limits>
#include <ostream>

#include "hochdef/errors.hpp"

namespace hochdef {

namespace {

using i128 = __int128;
using u128 = unsigned __int128;

constexpr std::int64_t kMin = std::numeric_limits<std::int64_t>::min();
constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();

u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

u128 abs128(i128 v) { return v < 0 ? static_cast<u128>(-v) : static_cast<u128>(v); }

bool fits64(i128 v) { return v >= kMin && v <= kMax; }

mpz_class to_mpz(i128 v) {
  bool neg = v < 0;
  u128 u = abs128(v);
  mpz_class hi = static_cast<unsigned long>(u >> 64);
  mpz_class lo = static_cast<unsigned long>(u & ~static_cast<std::uint64_t>(0));
  mpz_class r = (hi << 64) + lo;
  return neg ? mpz_class(-r) : r;
}

bool is_prime(std::uint32_t p) {
  if (p < 2) return false;
  for (std::uint64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

std::int64_t mod_pow(std::int64_t base, std::int64_t exp, std::int64_t p) {
  std::int64_t result = 1 % p;
  base %= p;
  while (exp > 0) {
    if (exp & 1) result = result * base % p;
    base = base * base % p;
    exp >>= 1;
  }
  return result;
}

}  // namespace

Field Field::prime(std::uint32_t p) {
  if (p >= (1u << 31) || !is_prime(p))
    throw InvariantViolation("field characteristic " + std::to_string(p) + " is not a prime below 2^31");
  return Field(p);
}

std::string Field::name() const { return is_rational() ? "Q" : "F" + std::to_string(modulus_); }

// ---------------------------------------------------------------- Rational

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw Error("rational with zero denominator");
  *this = from_mpq(mpq_class(mpz_class(static_cast<long>(n)), mpz_class(static_cast<long>(d))));
}

Rational::Rational(const mpq_class& q) { *this = from_mpq(q); }

Rational::Rational(const Rational& other) : num_(other.num_), den_(other.den_) {
  if (other.big_) big_ = std::make_unique<mpq_class>(*other.big_);
}

Rational& Rational::operator=(const Rational& other) {
  if (this == &other) return *this;
  num_ = other.num_;
  den_ = other.den_;
  if (other.big_)
    big_ = std::make_unique<mpq_class>(*other.big_);
  else
    big_.reset();
  return *this;
}

int Rational::sign() const {
  if (big_) return sgn(*big_);
  return (num_ > 0) - (num_ < 0);
}

mpq_class Rational::to_mpq() const {
  if (big_) return *big_;
  return mpq_class(mpz_class(static_cast<long>(num_)), mpz_class(static_cast<long>(den_)));
}

Rational Rational::from_mpq(mpq_class q) {
  q.canonicalize();
  Rational r;
  if (q.get_num().fits_slong_p() && q.get_den().fits_slong_p()) {
    r.num_ = q.get_num().get_si();
    r.den_ = q.get_den().get_si();
  } else {
    r.big_ = std::make_unique<mpq_class>(std::move(q));
  }
  return r;
}

Rational Rational::from_wide(i128 num, i128 den) {
  if (num == 0) return Rational();
  u128 g = gcd128(abs128(num), abs128(den));
  num /= static_cast<i128>(g);
  den /= static_cast<i128>(g);
  if (den < 0) {
    num = -num;
    den = -den;
  }
  if (fits64(num) && fits64(den)) {
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
  }
  Rational r;
  r.big_ = std::make_unique<mpq_class>(to_mpz(num), to_mpz(den));
  return r;
}

Rational Rational::operator-() const {
  if (big_ || num_ == kMin) return from_mpq(-to_mpq());
  Rational r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

Rational operator+(const Rational& a, const Rational& b) {
  if (a.big_ || b.big_) return Rational::from_mpq(a.to_mpq() + b.to_mpq());
  if (b.num_ == 0) return a;
  if (a.num_ == 0) return b;
  if (a.den_ == 1 && b.den_ == 1) {
    i128 s = static_cast<i128>(a.num_) + b.num_;
    if (fits64(s)) return Rational(static_cast<std::int64_t>(s));
  }
  i128 num = static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_;
  i128 den = static_cast<i128>(a.den_) * b.den_;
  return Rational::from_wide(num, den);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  if (a.big_ || b.big_) return Rational::from_mpq(a.to_mpq() * b.to_mpq());
  if (a.num_ == 0 || b.num_ == 0) return Rational();
  if (a.den_ == 1 && b.den_ == 1) {
    i128 p = static_cast<i128>(a.num_) * b.num_;
    if (fits64(p)) return Rational(static_cast<std::int64_t>(p));
  }
  i128 num = static_cast<i128>(a.num_) * b.num_;
  i128 den = static_cast<i128>(a.den_) * b.den_;
  return Rational::from_wide(num, den);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.is_zero()) throw Error("division by zero");
  if (a.big_ || b.big_) return Rational::from_mpq(a.to_mpq() / b.to_mpq());
  i128 num = static_cast<i128>(a.num_) * b.den_;
  i128 den = static_cast<i128>(a.den_) * b.num_;
  return Rational::from_wide(num, den);
}

bool operator==(const Rational& a, const Rational& b) {
  if (a.big_ || b.big_) return a.to_mpq() == b.to_mpq();
  return a.num_ == b.num_ && a.den_ == b.den_;
}

std::string Rational::to_string() const {
  if (big_) return big_->get_str();
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw Error("empty rational literal");
  std::size_t slash = s.find('/');
  auto valid_int = [](const std::string& part) {
    if (part.empty()) return false;
    std::size_t start = (part[0] == '-' || part[0] == '+') ? 1 : 0;
    if (start == part.size()) return false;
    for (std::size_t i = start; i < part.size(); ++i)
      if (part[i] < '0' || part[i] > '9') return false;
    return true;
  };
  std::string num = slash == std::string::npos ? s : s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!valid_int(num) || !valid_int(den)) throw Error("malformed rational literal '" + s + "'");
  if (num[0] == '+') num.erase(0, 1);
  if (den[0] == '+') den.erase(0, 1);
  mpz_class n(num), d(den);
  if (d == 0) throw Error("rational literal '" + s + "' has zero denominator");
  return from_mpq(mpq_class(n, d));
}

// ---------------------------------------------------------------- Scalar

namespace {

Rational reduce_mod(const Rational& v, std::uint32_t p) {
  mpq_class q = v.to_mpq();
  mpz_class num = q.get_num() % p;
  if (num < 0) num += p;
  mpz_class den = q.get_den() % p;
  if (den == 0) throw Error("rational " + v.to_string() + " has no image in F" + std::to_string(p));
  std::int64_t n = num.get_si();
  std::int64_t d = den.get_si();
  std::int64_t inv = mod_pow(d, p - 2, p);
  return Rational(n * inv % p);
}

}  // namespace

Scalar::Scalar(Field f, std::int64_t v) : field_(f) {
  if (f.is_rational()) {
    value_ = Rational(v);
  } else {
    std::int64_t p = f.characteristic();
    std::int64_t r = v % p;
    if (r < 0) r += p;
    value_ = Rational(r);
  }
}

Scalar::Scalar(Field f, const Rational& v) : field_(f) {
  value_ = f.is_rational() ? v : reduce_mod(v, f.characteristic());
}

void Scalar::check_same(const Scalar& o) const {
  if (!(field_ == o.field_))
    throw FieldMismatch("mixed-field arithmetic: " + field_.name() + " vs " + o.field_.name());
}

Scalar Scalar::operator-() const {
  Scalar r = *this;
  if (field_.is_rational()) {
    r.value_ = -value_;
  } else if (!value_.is_zero()) {
    r.value_ = Rational(static_cast<std::int64_t>(field_.characteristic()) - value_.small_num());
  }
  return r;
}

Scalar Scalar::inverse() const {
  if (is_zero()) throw Error("inverse of zero");
  Scalar r = *this;
  if (field_.is_rational()) {
    r.value_ = Rational(1) / value_;
  } else {
    std::int64_t p = field_.characteristic();
    r.value_ = Rational(mod_pow(value_.small_num(), p - 2, p));
  }
  return r;
}

Scalar& Scalar::operator+=(const Scalar& o) {
  check_same(o);
  if (field_.is_rational()) {
    value_ = value_ + o.value_;
  } else {
    std::int64_t p = field_.characteristic();
    value_ = Rational((value_.small_num() + o.value_.small_num()) % p);
  }
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
  check_same(o);
  if (field_.is_rational()) {
    value_ = value_ - o.value_;
  } else {
    std::int64_t p = field_.characteristic();
    value_ = Rational((value_.small_num() - o.value_.small_num() + p) % p);
  }
  return *this;
}

Scalar& Scalar::operator*=(const Scalar& o) {
  check_same(o);
  if (field_.is_rational()) {
    value_ = value_ * o.value_;
  } else {
    std::int64_t p = field_.characteristic();
    value_ = Rational(value_.small_num() * o.value_.small_num() % p);
  }
  return *this;
}

bool operator==(const Scalar& a, const Scalar& b) {
  a.check_same(b);
  return a.value_ == b.value_;
}

std::string Scalar::to_string() const { return value_.to_string(); }

Scalar Scalar::parse(Field f, std::string_view text) { return Scalar(f, Rational::parse(text)); }

std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.to_string(); }

}  // namespace hochdef
