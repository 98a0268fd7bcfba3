#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

namespace hochdef {

// The base field: either Q (modulus 0) or F_p for a prime p < 2^31.
class Field {
 public:
  constexpr Field() = default;

  static constexpr Field rationals() { return Field{}; }
  static Field prime(std::uint32_t p);

  constexpr bool is_rational() const { return modulus_ == 0; }
  constexpr std::uint32_t characteristic() const { return modulus_; }
  std::string name() const;

  friend constexpr bool operator==(Field, Field) = default;

 private:
  constexpr explicit Field(std::uint32_t p) : modulus_(p) {}
  std::uint32_t modulus_ = 0;
};

// Arbitrary precision rational. Values whose numerator and denominator fit
// in int64 are kept inline; anything larger is promoted to GMP and demoted
// again once it shrinks.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t n) : num_(n) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t n, std::int64_t d);
  explicit Rational(const mpq_class& q);

  Rational(const Rational& other);
  Rational(Rational&&) noexcept = default;
  Rational& operator=(const Rational& other);
  Rational& operator=(Rational&&) noexcept = default;
  ~Rational() = default;

  bool is_zero() const { return !big_ && num_ == 0; }
  bool is_one() const { return !big_ && num_ == 1 && den_ == 1; }
  int sign() const;
  bool is_small() const { return !big_; }
  std::int64_t small_num() const { return num_; }
  std::int64_t small_den() const { return den_; }
  mpq_class to_mpq() const;

  Rational operator-() const;
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b);

  std::string to_string() const;
  // Accepts "p", "-p", "p/q" with arbitrary length integers.
  static Rational parse(std::string_view text);

 private:
  static Rational from_mpq(mpq_class q);
  // num/den with den != 0; normalizes and chooses the representation.
  static Rational from_wide(__int128 num, __int128 den);
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  std::unique_ptr<mpq_class> big_;
};

// Element of a Field. Every binary operation checks that both operands
// live in the same field and throws FieldMismatch otherwise.
class Scalar {
 public:
  Scalar() = default;
  Scalar(Field f, std::int64_t v);
  Scalar(Field f, const Rational& v);

  static Scalar zero(Field f) { return Scalar(f, 0); }
  static Scalar one(Field f) { return Scalar(f, 1); }

  Field field() const { return field_; }
  bool is_zero() const { return value_.is_zero(); }
  bool is_one() const { return value_.is_one(); }
  // Rational value for Q, residue in [0, p) for F_p.
  const Rational& value() const { return value_; }

  Scalar operator-() const;
  Scalar inverse() const;
  Scalar& operator+=(const Scalar& o);
  Scalar& operator-=(const Scalar& o);
  Scalar& operator*=(const Scalar& o);
  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(const Scalar& a, const Scalar& b) { return a * b.inverse(); }
  friend bool operator==(const Scalar& a, const Scalar& b);

  std::string to_string() const;
  static Scalar parse(Field f, std::string_view text);

 private:
  void check_same(const Scalar& o) const;
  Field field_;
  Rational value_;
};

std::ostream& operator<<(std::ostream& os, const Scalar& s);

}  // namespace hochdef
