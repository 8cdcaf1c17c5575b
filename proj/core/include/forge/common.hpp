#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace forge {

// Error hierarchy. CLI maps these onto exit codes:
//   ConfigError -> 2, ConstructionError -> 3, VerificationError -> 4.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct ConstructionError : Error {
  using Error::Error;
};
struct VerificationError : Error {
  using Error::Error;
};
struct CapacityError : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};

// Exact rational with automatic reduction; used for gammas and frequencies
// computed from full enumeration.
class Rational {
public:
  Rational() = default;
  Rational(long long num, long long den) : num_(num), den_(den) { reduce(); }
  // NOLINTNEXTLINE(google-explicit-constructor)
  Rational(long long num) : num_(num), den_(1) {}

  long long num() const { return num_; }
  long long den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  Rational operator+(const Rational& o) const {
    return {num_ * o.den_ + o.num_ * den_, den_ * o.den_};
  }
  Rational operator-(const Rational& o) const {
    return {num_ * o.den_ - o.num_ * den_, den_ * o.den_};
  }
  Rational operator*(const Rational& o) const { return {num_ * o.num_, den_ * o.den_}; }
  Rational operator/(const Rational& o) const { return {num_ * o.den_, den_ * o.num_}; }
  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  auto operator<=>(const Rational& o) const {
    return num_ * o.den_ <=> o.num_ * den_;
  }

private:
  void reduce() {
    if (den_ == 0) throw Error("Rational: zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    long long g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }
  long long num_ = 0;
  long long den_ = 1;
};

// FNV-1a, used for stable config fingerprints embedded in artifacts.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace forge
