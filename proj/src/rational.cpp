#include "mspec/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace mspec {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\n\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\n\r");
    return s.substr(b, e - b + 1);
}

Z parse_int(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty integer");
    size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) throw std::invalid_argument("bad integer: " + s);
    for (size_t k = i; k < s.size(); ++k)
        if (s[k] < '0' || s[k] > '9') throw std::invalid_argument("bad integer: " + s);
    return Z(s[0] == '+' ? s.substr(1) : s);
}

}  // namespace

Q parse_q(const std::string& text) {
    std::string s = trim(text);
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Z n = parse_int(trim(s.substr(0, slash)));
        Z d = parse_int(trim(s.substr(slash + 1)));
        if (d == 0) throw std::invalid_argument("zero denominator: " + s);
        return Q(n, d);
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
        bool neg = !ip.empty() && ip[0] == '-';
        if (neg || (!ip.empty() && ip[0] == '+')) ip = ip.substr(1);
        if (ip.empty()) ip = "0";
        if (fp.empty()) fp = "0";
        Z scale = 1;
        for (size_t k = 0; k < fp.size(); ++k) scale *= 10;
        Q r = Q(parse_int(ip)) + Q(parse_int(fp), scale);
        return neg ? -r : r;
    }
    return Q(parse_int(s));
}

std::string q_str(const Q& q) {
    if (is_integer(q)) return num(q).str();
    return num(q).str() + "/" + den(q).str();
}

Z gcd_z(const Z& a, const Z& b) { return boost::multiprecision::gcd(a, b); }

Z lcm_z(const Z& a, const Z& b) {
    if (a == 0 || b == 0) return 0;
    return boost::multiprecision::abs(a / gcd_z(a, b) * b);
}

Z floor_q(const Q& q) {
    Z n = num(q), d = den(q);
    Z f = n / d;
    if (n < 0 && f * d != n) f -= 1;
    return f;
}

Z ceil_q(const Q& q) { return -floor_q(-q); }

double to_double(const Q& q) { return q.convert_to<double>(); }

long long to_ll(const Z& z) { return z.convert_to<long long>(); }

std::pair<Z, Z> balance(const Q& x, const Q& y) {
    if (x <= 0 || y <= 0) throw std::invalid_argument("balance needs positive inputs");
    // a*x = b*y  =>  a/b = y/x
    Q r = y / x;
    return {num(r), den(r)};
}

Z common_denominator(const std::vector<Q>& v) {
    Z l = 1;
    for (const auto& q : v) l = lcm_z(l, den(q));
    return l;
}

}  // namespace mspec
