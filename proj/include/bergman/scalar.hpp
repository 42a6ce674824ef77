#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/mpfr.hpp>

namespace bergman {

// Extended-precision reals. Expression templates are off so that
// std::complex<Real> works through ordinary overload resolution.
using mp128 = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<39>,
                                            boost::multiprecision::et_off>;
using mp256 = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<77>,
                                            boost::multiprecision::et_off>;
using mp512 = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<154>,
                                            boost::multiprecision::et_off>;

template <class Real>
using complex_t = std::complex<Real>;

/// Error categories map onto CLI exit codes (2 input, 3 numerical, 4 precondition).
enum class error_kind { input = 2, numerical = 3, precondition = 4 };

class error : public std::runtime_error {
public:
  error(error_kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  error_kind kind() const noexcept { return kind_; }

private:
  error_kind kind_;
};

inline error input_error(const std::string& msg) { return {error_kind::input, msg}; }
inline error numerical_error(const std::string& msg) { return {error_kind::numerical, msg}; }
inline error precondition_error(const std::string& msg) { return {error_kind::precondition, msg}; }

/// Nominal precision of a real type: 53, 128, 256 or 512.
template <class Real>
constexpr int precision_bits() {
  if constexpr (std::is_same_v<Real, mp128>) return 128;
  else if constexpr (std::is_same_v<Real, mp256>) return 256;
  else if constexpr (std::is_same_v<Real, mp512>) return 512;
  else return std::numeric_limits<Real>::digits;
}

template <class Real>
Real pi() {
  return boost::math::constants::pi<Real>();
}

template <class Real>
Real epsilon() {
  return std::numeric_limits<Real>::epsilon();
}

template <class Real>
double to_double(const Real& x) {
  if constexpr (std::is_same_v<Real, double>)
    return x;
  else
    return x.template convert_to<double>();
}

template <class Real>
std::complex<double> to_double(const std::complex<Real>& z) {
  return {to_double(z.real()), to_double(z.imag())};
}

template <class To, class From>
To real_cast(const From& x) {
  if constexpr (std::is_same_v<To, From>)
    return x;
  else if constexpr (std::is_same_v<To, double>)
    return to_double(x);
  else
    return To(x);
}

template <class To, class From>
std::complex<To> complex_cast(const std::complex<From>& z) {
  return {real_cast<To>(z.real()), real_cast<To>(z.imag())};
}

/// Shortest decimal string that round-trips at the type's precision.
template <class Real>
std::string to_string_full(const Real& x) {
  std::ostringstream os;
  os.precision(std::numeric_limits<Real>::max_digits10);
  os << x;
  return os.str();
}

template <class Real>
Real parse_real(const std::string& s) {
  if constexpr (std::is_same_v<Real, double>) {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw input_error("not a number: '" + s + "'");
    return v;
  } else {
    return Real(s);
  }
}

template <class Real>
Real abs2(const std::complex<Real>& z) {
  return z.real() * z.real() + z.imag() * z.imag();
}

/// Calls f with a value-initialized tag of the real type selected by `bits`.
template <class F>
decltype(auto) with_precision(int bits, F&& f) {
  switch (bits) {
    case 53: return f(double{});
    case 128: return f(mp128{});
    case 256: return f(mp256{});
    case 512: return f(mp512{});
  }
  throw precondition_error("unsupported precision " + std::to_string(bits) +
                           " (expected 53, 128, 256 or 512)");
}

}  // namespace bergman
