#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace mspec {

using Q = boost::multiprecision::cpp_rational;
using Z = boost::multiprecision::cpp_int;

// Parses "p", "-p", "p/q" and plain decimals such as "0.25".
Q parse_q(const std::string& text);

// "p" for integers, "p/q" otherwise.
std::string q_str(const Q& q);

inline Z num(const Q& q) { return boost::multiprecision::numerator(q); }
inline Z den(const Q& q) { return boost::multiprecision::denominator(q); }
inline bool is_integer(const Q& q) { return den(q) == 1; }
inline int sign(const Q& q) { return q.sign(); }

Z gcd_z(const Z& a, const Z& b);
Z lcm_z(const Z& a, const Z& b);

Z floor_q(const Q& q);
Z ceil_q(const Q& q);
double to_double(const Q& q);
long long to_ll(const Z& z);

// Coprime positive (a, b) with a*x = b*y for positive rationals x, y.
std::pair<Z, Z> balance(const Q& x, const Q& y);

// lcm of the denominators in a vector.
Z common_denominator(const std::vector<Q>& v);

using Vec = std::vector<Q>;
using Matrix = std::vector<Vec>;

}  // namespace mspec
