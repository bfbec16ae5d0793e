#include "mspec/monomial.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mspec {

std::string default_var_name(const VarId& v) {
    switch (v.kind) {
        case VarKind::Tau: return "t" + std::to_string(v.index);
        case VarKind::Lambda: return "l" + std::to_string(v.index);
        case VarKind::XiNorm: return "|xi" + std::to_string(v.index) + "|";
    }
    return "?";
}

std::string var_key(const VarId& v) {
    switch (v.kind) {
        case VarKind::Tau: return "tau:" + std::to_string(v.index);
        case VarKind::Lambda: return "lambda:" + std::to_string(v.index);
        case VarKind::XiNorm: return "xi:" + std::to_string(v.index);
    }
    return "?";
}

VarId parse_var_key(const std::string& key) {
    auto c = key.find(':');
    if (c == std::string::npos) throw std::invalid_argument("bad variable key: " + key);
    std::string k = key.substr(0, c);
    int idx = std::stoi(key.substr(c + 1));
    if (idx < 1) throw std::invalid_argument("variable index must be positive: " + key);
    if (k == "tau") return tau_var(idx);
    if (k == "lambda") return lambda_var(idx);
    if (k == "xi") return xi_var(idx);
    throw std::invalid_argument("bad variable kind: " + key);
}

Monomial Monomial::var(const VarId& v, const Q& e) {
    Monomial m;
    m.set(v, e);
    return m;
}

Monomial Monomial::from_tau_exponents(const Vec& e) {
    Monomial m;
    for (size_t k = 0; k < e.size(); ++k) m.set(tau_var(int(k) + 1), e[k]);
    return m;
}

Q Monomial::exponent(const VarId& v) const {
    auto it = exps_.find(v);
    return it == exps_.end() ? Q(0) : it->second;
}

void Monomial::set(const VarId& v, const Q& e) {
    if (e == 0)
        exps_.erase(v);
    else
        exps_[v] = e;
}

bool Monomial::has_kind(VarKind k) const {
    for (const auto& [v, e] : exps_)
        if (v.kind == k) return true;
    return false;
}

bool Monomial::only_kind(VarKind k) const {
    for (const auto& [v, e] : exps_)
        if (v.kind != k) return false;
    return true;
}

int Monomial::max_index(VarKind k) const {
    int r = 0;
    for (const auto& [v, e] : exps_)
        if (v.kind == k) r = std::max(r, v.index);
    return r;
}

Monomial& Monomial::operator*=(const Monomial& o) {
    for (const auto& [v, e] : o.exps_) set(v, exponent(v) + e);
    return *this;
}

Monomial Monomial::operator*(const Monomial& o) const {
    Monomial r = *this;
    r *= o;
    return r;
}

Monomial Monomial::operator/(const Monomial& o) const { return *this * o.inverse(); }

Monomial Monomial::pow(const Q& n) const {
    Monomial r;
    if (n == 0) return r;
    for (const auto& [v, e] : exps_) r.exps_[v] = e * n;
    return r;
}

Monomial Monomial::without_kind(VarKind k) const {
    Monomial r;
    for (const auto& [v, e] : exps_)
        if (v.kind != k) r.exps_[v] = e;
    return r;
}

Monomial Monomial::restrict_kind(VarKind k) const {
    Monomial r;
    for (const auto& [v, e] : exps_)
        if (v.kind == k) r.exps_[v] = e;
    return r;
}

Monomial Monomial::without(const VarId& var) const {
    Monomial r = *this;
    r.exps_.erase(var);
    return r;
}

Monomial Monomial::rekind(VarKind from, VarKind to) const {
    Monomial r;
    for (const auto& [v, e] : exps_) {
        VarId w = v;
        if (w.kind == from) w.kind = to;
        r.set(w, r.exponent(w) + e);
    }
    return r;
}

namespace {
Vec kind_vector(const std::map<VarId, Q>& exps, VarKind k, int n) {
    Vec out(n, Q(0));
    for (const auto& [v, e] : exps) {
        if (v.kind != k) continue;
        if (v.index > n) throw std::out_of_range("variable index exceeds vector length");
        out[v.index - 1] = e;
    }
    return out;
}

std::string power_str(const std::string& name, const Q& e) {
    if (e == 1) return name;
    if (is_integer(e)) return name + "^" + q_str(e);
    return name + "^(" + q_str(e) + ")";
}
}  // namespace

Vec Monomial::tau_vector(int m) const { return kind_vector(exps_, VarKind::Tau, m); }
Vec Monomial::lambda_vector(int ell) const { return kind_vector(exps_, VarKind::Lambda, ell); }
Vec Monomial::xi_vector(int m) const { return kind_vector(exps_, VarKind::XiNorm, m); }

double Monomial::evaluate(const std::function<double(const VarId&)>& value) const {
    double r = 1.0;
    for (const auto& [v, e] : exps_) {
        double x = value(v);
        if (!(x > 0)) throw std::invalid_argument("evaluate needs positive inputs");
        r *= std::pow(x, to_double(e));
    }
    return r;
}

std::string Monomial::str(const VarNamer& namer) const {
    if (exps_.empty()) return "1";
    std::string out;
    for (const auto& [v, e] : exps_) {
        if (!out.empty()) out += "*";
        out += namer(v);
        if (e != 1) out += "^(" + q_str(e) + ")";
    }
    return out;
}

std::string Monomial::pretty(const VarNamer& namer) const {
    std::vector<std::string> up, down;
    for (const auto& [v, e] : exps_) {
        if (e > 0)
            up.push_back(power_str(namer(v), e));
        else
            down.push_back(power_str(namer(v), -e));
    }
    auto join = [](const std::vector<std::string>& xs) {
        std::string s;
        for (const auto& x : xs) s += (s.empty() ? "" : "*") + x;
        return s;
    };
    std::string n = up.empty() ? "1" : join(up);
    if (down.empty()) return n;
    std::string d = join(down);
    if (down.size() > 1) d = "(" + d + ")";
    return n + "/" + d;
}

std::string Monomial::latex(const VarNamer& namer) const {
    auto part = [&](bool positive) {
        std::string s;
        for (const auto& [v, e] : exps_) {
            if ((e > 0) != positive) continue;
            Q a = positive ? e : -e;
            s += namer(v);
            if (a != 1) s += "^{" + q_str(a) + "}";
        }
        return s;
    };
    std::string n = part(true), d = part(false);
    if (n.empty()) n = "1";
    if (d.empty()) return n;
    return "\\frac{" + n + "}{" + d + "}";
}

Value Value::of(const Monomial& m) {
    if (!m.only_kind(VarKind::XiNorm))
        throw std::invalid_argument("a value term may only use xi-norm variables");
    return Value(false, m);
}

Value Value::operator*(const Value& o) const {
    if (zero_ || o.zero_) return zero();
    return Value(false, mono_ * o.mono_);
}

Value Value::pow(const Q& n) const {
    if (n == 0) return unit();
    if (zero_) {
        if (n < 0) throw std::invalid_argument("negative power of a zero value");
        return zero();
    }
    return Value(false, mono_.pow(n));
}

std::string Value::str(const VarNamer& namer) const {
    if (zero_) return "0";
    return mono_.pretty(namer);
}

std::string GenPair::str(const VarNamer& namer) const {
    return "(" + f.pretty(namer) + ", " + v.str(namer) + ")";
}

GenPair pair_pow(const GenPair& p, const Q& n) {
    if (n < 0) throw std::invalid_argument("pair_pow: negative exponent");
    return {p.f.pow(n), p.v.pow(n)};
}

Q exponent_of(const GenPair& p, const VarId& var) { return p.f.exponent(var); }

GenSet fraction_closure(const GenSet& a) {
    GenSet out = a;
    for (const auto& p : a)
        if (!p.v.is_zero()) out.insert({p.f.inverse(), p.v.inverse()});
    return out;
}

EvalResult evaluate(const GenPair& p, const std::vector<double>& tau,
                    const std::vector<double>& xi_norms, const std::vector<double>& lambda) {
    auto lookup = [&](const VarId& v) -> double {
        const std::vector<double>* src = nullptr;
        switch (v.kind) {
            case VarKind::Tau: src = &tau; break;
            case VarKind::Lambda: src = &lambda; break;
            case VarKind::XiNorm: src = &xi_norms; break;
        }
        if (v.index < 1 || size_t(v.index) > src->size())
            throw std::out_of_range("evaluate: missing value for " + default_var_name(v));
        return (*src)[v.index - 1];
    };
    for (double t : tau)
        if (!(t > 0)) throw std::invalid_argument("evaluate: nonpositive tau");
    EvalResult r;
    r.f = p.f.evaluate(lookup);
    r.v = p.v.is_zero() ? 0.0 : p.v.mono().evaluate(lookup);
    return r;
}

std::string genset_str(const GenSet& s, const VarNamer& namer) {
    std::string out = "{";
    bool first = true;
    for (const auto& p : s) {
        if (!first) out += ", ";
        first = false;
        out += p.str(namer);
    }
    return out + "}";
}

bool has_lambda(const GenSet& s) {
    for (const auto& p : s)
        if (p.f.has_kind(VarKind::Lambda)) return true;
    return false;
}

nlohmann::json to_json(const Monomial& m) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [v, e] : m.exponents()) j[var_key(v)] = q_str(e);
    return j;
}

nlohmann::json to_json(const Value& v) {
    if (v.is_zero()) return "0";
    return to_json(v.mono());
}

nlohmann::json to_json(const GenPair& p) {
    return {{"exponents", to_json(p.f)}, {"value", to_json(p.v)}, {"text", p.str()}};
}

nlohmann::json to_json(const GenSet& s) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& p : s) j.push_back(to_json(p));
    return j;
}

Monomial monomial_from_json(const nlohmann::json& j) {
    if (j.is_string()) return parse_monomial(j.get<std::string>());
    Monomial m;
    for (auto it = j.begin(); it != j.end(); ++it) {
        Q e = it.value().is_string() ? parse_q(it.value().get<std::string>())
                                     : Q(it.value().get<long long>());
        m.set(parse_var_key(it.key()), e);
    }
    return m;
}

Value value_from_json(const nlohmann::json& j) {
    if (j.is_string() && j.get<std::string>() == "0") return Value::zero();
    if (j.is_number() && j.get<double>() == 0.0) return Value::zero();
    return Value::of(monomial_from_json(j));
}

GenPair pair_from_json(const nlohmann::json& j) {
    return {monomial_from_json(j.at("exponents")), value_from_json(j.at("value"))};
}

GenSet genset_from_json(const nlohmann::json& j) {
    GenSet s;
    for (const auto& e : j) s.insert(pair_from_json(e));
    return s;
}

namespace {

class MonoParser {
public:
    explicit MonoParser(const std::string& s) : s_(s) {}

    Monomial parse() {
        Monomial m = expr();
        skip();
        if (pos_ != s_.size()) fail("trailing input");
        return m;
    }

private:
    [[noreturn]] void fail(const std::string& why) {
        throw std::invalid_argument("cannot parse monomial '" + s_ + "': " + why);
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    std::string digits() {
        skip();
        size_t b = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (b == pos_) fail("expected digits");
        return s_.substr(b, pos_ - b);
    }
    Q exponent() {
        if (eat('(')) {
            skip();
            size_t b = pos_;
            while (pos_ < s_.size() && s_[pos_] != ')') ++pos_;
            if (pos_ == s_.size()) fail("unclosed exponent");
            Q e = parse_q(s_.substr(b, pos_ - b));
            ++pos_;
            return e;
        }
        bool neg = eat('-');
        Q e = Q(Z(digits()));
        return neg ? -e : e;
    }
    Monomial atom() {
        skip();
        if (eat('(')) {
            Monomial m = expr();
            if (!eat(')')) fail("expected ')'");
            return m;
        }
        if (pos_ >= s_.size()) fail("unexpected end");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            if (digits() != "1") fail("only the constant 1 is allowed");
            return {};
        }
        VarKind kind;
        if (c == 't')
            kind = VarKind::Tau;
        else if (c == 'l')
            kind = VarKind::Lambda;
        else if (c == 'x')
            kind = VarKind::XiNorm;
        else
            fail(std::string("unknown variable '") + c + "'");
        ++pos_;
        int idx = std::stoi(digits());
        if (idx < 1) fail("index must be positive");
        return Monomial::var({kind, idx});
    }
    Monomial factor() {
        Monomial m = atom();
        if (eat('^')) m = m.pow(exponent());
        return m;
    }
    Monomial expr() {
        Monomial m = factor();
        for (;;) {
            if (eat('*'))
                m *= factor();
            else if (eat('/'))
                m *= factor().inverse();
            else
                return m;
        }
    }

    std::string s_;
    size_t pos_ = 0;
};

}  // namespace

Monomial parse_monomial(const std::string& text) { return MonoParser(text).parse(); }

}  // namespace mspec
