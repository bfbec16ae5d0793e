#pragma once

#include "mspec/rational.hpp"

#include <compare>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace mspec {

enum class VarKind { Tau = 0, Lambda = 1, XiNorm = 2 };

struct VarId {
    VarKind kind = VarKind::Tau;
    int index = 1;
    auto operator<=>(const VarId&) const = default;
};

inline VarId tau_var(int k) { return {VarKind::Tau, k}; }
inline VarId lambda_var(int j) { return {VarKind::Lambda, j}; }
inline VarId xi_var(int k) { return {VarKind::XiNorm, k}; }

using VarNamer = std::function<std::string(const VarId&)>;
std::string default_var_name(const VarId& v);
// "tau:1", "lambda:4", "xi:3"
std::string var_key(const VarId& v);
VarId parse_var_key(const std::string& key);

class Monomial {
public:
    Monomial() = default;
    static Monomial var(const VarId& v, const Q& e = 1);
    static Monomial tau(int k, const Q& e = 1) { return var(tau_var(k), e); }
    static Monomial lambda(int j, const Q& e = 1) { return var(lambda_var(j), e); }
    static Monomial xi(int k, const Q& e = 1) { return var(xi_var(k), e); }
    // exponent vector on tau_1..tau_m
    static Monomial from_tau_exponents(const Vec& e);

    Q exponent(const VarId& v) const;
    void set(const VarId& v, const Q& e);
    const std::map<VarId, Q>& exponents() const { return exps_; }

    bool is_one() const { return exps_.empty(); }
    bool has_kind(VarKind k) const;
    bool only_kind(VarKind k) const;
    int max_index(VarKind k) const;

    Monomial operator*(const Monomial& o) const;
    Monomial operator/(const Monomial& o) const;
    Monomial& operator*=(const Monomial& o);
    Monomial pow(const Q& n) const;
    Monomial inverse() const { return pow(-1); }

    // drops (or keeps only) variables of one kind
    Monomial without_kind(VarKind k) const;
    Monomial restrict_kind(VarKind k) const;
    Monomial without(const VarId& v) const;
    // renames every variable of kind `from` to kind `to` (same index)
    Monomial rekind(VarKind from, VarKind to) const;

    Vec tau_vector(int m) const;
    Vec lambda_vector(int ell) const;
    Vec xi_vector(int m) const;

    double evaluate(const std::function<double(const VarId&)>& value) const;

    // "t1^(3/2)*t3^(-1)", "1" for the unit
    std::string str(const VarNamer& namer = default_var_name) const;
    // fraction display "t1*t3/t2"
    std::string pretty(const VarNamer& namer = default_var_name) const;
    // LaTeX fraction display
    std::string latex(const VarNamer& namer) const;

    bool operator==(const Monomial& o) const { return exps_ == o.exps_; }
    bool operator<(const Monomial& o) const { return exps_ < o.exps_; }

private:
    std::map<VarId, Q> exps_;
};

// mono_mul of the algebra: exponentwise sum
inline Monomial mono_mul(const Monomial& a, const Monomial& b) { return a * b; }

class Value {
public:
    static Value zero() { return Value(true, {}); }
    static Value unit() { return Value(false, {}); }
    static Value of(const Monomial& m);

    bool is_zero() const { return zero_; }
    bool is_unit() const { return !zero_ && mono_.is_one(); }
    const Monomial& mono() const { return mono_; }

    Value operator*(const Value& o) const;
    Value pow(const Q& n) const;  // n < 0 needs a nonzero value
    Value inverse() const { return pow(-1); }

    std::string str(const VarNamer& namer = default_var_name) const;

    bool operator==(const Value& o) const { return zero_ == o.zero_ && mono_ == o.mono_; }
    bool operator<(const Value& o) const {
        if (zero_ != o.zero_) return zero_;  // Zero sorts first
        return mono_ < o.mono_;
    }

private:
    Value(bool z, Monomial m) : zero_(z), mono_(std::move(m)) {}
    bool zero_ = false;
    Monomial mono_;
};

struct GenPair {
    Monomial f;
    Value v = Value::unit();

    GenPair() = default;
    GenPair(Monomial f_, Value v_) : f(std::move(f_)), v(std::move(v_)) {}

    GenPair operator*(const GenPair& o) const { return {f * o.f, v * o.v}; }
    bool operator==(const GenPair& o) const { return f == o.f && v == o.v; }
    bool operator<(const GenPair& o) const {
        if (!(f == o.f)) return f < o.f;
        return v < o.v;
    }
    std::string str(const VarNamer& namer = default_var_name) const;
};

using GenSet = std::set<GenPair>;

GenPair pair_pow(const GenPair& p, const Q& n);
Q exponent_of(const GenPair& p, const VarId& var);
GenSet fraction_closure(const GenSet& a);

struct EvalResult {
    double f = 0;
    double v = 0;
};
// tau and xi_norms are 1-based by position (tau[0] is tau_1); lambda optional.
EvalResult evaluate(const GenPair& p, const std::vector<double>& tau,
                    const std::vector<double>& xi_norms,
                    const std::vector<double>& lambda = {});

std::string genset_str(const GenSet& s, const VarNamer& namer = default_var_name);

bool has_lambda(const GenSet& s);

nlohmann::json to_json(const Monomial& m);
nlohmann::json to_json(const Value& v);
nlohmann::json to_json(const GenPair& p);
nlohmann::json to_json(const GenSet& s);
Monomial monomial_from_json(const nlohmann::json& j);
Value value_from_json(const nlohmann::json& j);
GenPair pair_from_json(const nlohmann::json& j);
GenSet genset_from_json(const nlohmann::json& j);

// Parses "t3/(t1*t2)", "t1^(2/3)*t2^-1", "1", "l4".  Variables: t<k>, l<j>, x<k>.
Monomial parse_monomial(const std::string& text);

}  // namespace mspec
