#include "mspec/multicone.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace mspec {

namespace {

Polynomial constant(double c, int m) {
    Polynomial p;
    p.m = m;
    if (c != 0) p.terms[std::vector<int>(static_cast<size_t>(m), 0)] = c;
    return p;
}

Polynomial add(const Polynomial& a, const Polynomial& b, double sb = 1.0) {
    Polynomial out = a;
    for (const auto& [e, c] : b.terms) {
        out.terms[e] += sb * c;
        if (out.terms[e] == 0) out.terms.erase(e);
    }
    return out;
}

Polynomial mul(const Polynomial& a, const Polynomial& b) {
    Polynomial out;
    out.m = a.m;
    for (const auto& [ea, ca] : a.terms)
        for (const auto& [eb, cb] : b.terms) {
            std::vector<int> e(ea);
            for (size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
            out.terms[e] += ca * cb;
        }
    for (auto it = out.terms.begin(); it != out.terms.end();)
        it = it->second == 0 ? out.terms.erase(it) : std::next(it);
    return out;
}

class Parser {
public:
    Parser(const std::string& s, int m) : s_(s), m_(m) {}

    Polynomial parse() {
        Polynomial p = expr();
        skip();
        if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw InputError(msg + " in polynomial '" + s_ + "'", "point-set");
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }

    Polynomial expr() {
        Polynomial p = term();
        for (;;) {
            if (eat('+')) p = add(p, term());
            else if (eat('-')) p = add(p, term(), -1.0);
            else return p;
        }
    }
    Polynomial term() {
        Polynomial p = unary();
        while (eat('*')) p = mul(p, unary());
        return p;
    }
    Polynomial unary() {
        if (eat('-')) return mul(constant(-1.0, m_), unary());
        if (eat('+')) return unary();
        return power();
    }
    Polynomial power() {
        Polynomial base = atom();
        if (!eat('^')) return base;
        skip();
        size_t start = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (start == i_) fail("exponent must be a non-negative integer");
        int n = std::stoi(s_.substr(start, i_ - start));
        Polynomial out = constant(1.0, m_);
        for (int t = 0; t < n; ++t) out = mul(out, base);
        return out;
    }
    Polynomial atom() {
        skip();
        if (eat('(')) {
            Polynomial p = expr();
            if (!eat(')')) fail("missing ')'");
            return p;
        }
        if (i_ < s_.size() && (s_[i_] == 'x' || s_[i_] == 'z')) {
            ++i_;
            size_t start = i_;
            while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
            if (start == i_) fail("variable needs an index");
            int k = std::stoi(s_.substr(start, i_ - start));
            if (k < 1 || k > m_) fail("variable index " + std::to_string(k) + " out of range");
            Polynomial p;
            p.m = m_;
            std::vector<int> e(static_cast<size_t>(m_), 0);
            e[static_cast<size_t>(k - 1)] = 1;
            p.terms[e] = 1.0;
            return p;
        }
        size_t used = 0;
        double c = 0;
        try {
            c = std::stod(s_.substr(i_), &used);
        } catch (const std::exception&) {
            fail("expected a number or variable");
        }
        i_ += used;
        return constant(c, m_);
    }

    const std::string& s_;
    int m_;
    size_t i_ = 0;
};

}  // namespace

Polynomial Polynomial::parse(const std::string& text, int m) { return Parser(text, m).parse(); }

double Polynomial::eval(const std::vector<double>& x) const {
    double out = 0;
    for (const auto& [e, c] : terms) {
        double t = c;
        for (size_t i = 0; i < e.size(); ++i)
            if (e[i] != 0) t *= std::pow(x.at(i), e[i]);
        out += t;
    }
    return out;
}

int Polynomial::degree_in(int var) const {
    int d = 0;
    for (const auto& [e, c] : terms) d = std::max(d, e[static_cast<size_t>(var - 1)]);
    return d;
}

bool Polynomial::linear_in(int var) const { return degree_in(var) == 1; }

std::pair<Polynomial, Polynomial> Polynomial::split_linear(int var) const {
    Polynomial a, b;
    a.m = b.m = m;
    for (const auto& [e, c] : terms) {
        if (e[static_cast<size_t>(var - 1)] == 1) {
            auto e2 = e;
            e2[static_cast<size_t>(var - 1)] = 0;
            a.terms[e2] += c;
        } else {
            b.terms[e] += c;
        }
    }
    return {a, b};
}

PointSet PointSet::parse(const std::string& text, int m) {
    PointSet Z;
    Z.m = m;
    std::string t = text;
    auto trim = [](std::string s) {
        size_t a = s.find_first_not_of(" \t\n");
        size_t b = s.find_last_not_of(" \t\n");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    if (trim(t) == "empty") {
        Z.empty = true;
        return Z;
    }
    size_t pos = 0;
    while (pos <= t.size()) {
        size_t next = t.find_first_of(";,", pos);
        std::string c = trim(t.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
        pos = next == std::string::npos ? t.size() + 1 : next + 1;
        if (c.empty()) continue;
        static const char* ops[] = {"<=", ">=", "=", "<", ">"};
        size_t at = std::string::npos;
        std::string op;
        for (const char* o : ops) {
            size_t f = c.find(o);
            if (f != std::string::npos) {
                at = f;
                op = o;
                break;
            }
        }
        if (at == std::string::npos) throw InputError("constraint '" + c + "' has no relation", "point-set");
        Polynomial lhs = Polynomial::parse(c.substr(0, at), m);
        Polynomial rhs = Polynomial::parse(c.substr(at + op.size()), m);
        Polynomial diff = add(lhs, rhs, -1.0);
        if (op == "=") Z.equalities.push_back(diff);
        else if (op == ">") Z.inequalities.emplace_back(diff, true);
        else if (op == ">=") Z.inequalities.emplace_back(diff, false);
        else if (op == "<") Z.inequalities.emplace_back(add(constant(0, m), diff, -1.0), true);
        else Z.inequalities.emplace_back(add(constant(0, m), diff, -1.0), false);
    }

    // each equality is solved for its own variable, which no other equality mentions
    for (size_t i = 0; i < Z.equalities.size(); ++i) {
        int chosen = 0;
        for (int k = m; k >= 1 && chosen == 0; --k) {
            if (!Z.equalities[i].linear_in(k)) continue;
            bool elsewhere = false;
            for (size_t o = 0; o < Z.equalities.size(); ++o)
                if (o != i && Z.equalities[o].degree_in(k) > 0) elsewhere = true;
            if (std::find(Z.solved.begin(), Z.solved.end(), k) != Z.solved.end()) elsewhere = true;
            if (!elsewhere) chosen = k;
        }
        if (chosen == 0) throw InputError("equality " + std::to_string(i + 1) + " cannot be solved for a variable", "point-set");
        Z.solved.push_back(chosen);
    }
    return Z;
}

bool PointSet::contains(const std::vector<double>& x, double tol) const {
    if (empty) return false;
    for (const auto& p : equalities) {
        double scale = 0;
        for (const auto& [e, c] : p.terms) {
            double t = std::fabs(c);
            for (size_t i = 0; i < e.size(); ++i) t *= std::pow(std::fabs(x.at(i)), e[i]);
            scale += t;
        }
        if (std::fabs(p.eval(x)) > tol * scale) return false;
    }
    for (const auto& [p, strict] : inequalities) {
        double v = p.eval(x);
        if (strict ? !(v > 0) : !(v >= 0)) return false;
    }
    return true;
}

std::optional<std::vector<double>> PointSet::sample(std::mt19937_64& rng, double radius) const {
    if (empty) return std::nullopt;
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> x(static_cast<size_t>(m), 0.0);
    for (int k = 1; k <= m; ++k) {
        if (std::find(solved.begin(), solved.end(), k) != solved.end()) continue;
        double mag = radius * std::pow(10.0, -12.0 * U(rng));
        x[static_cast<size_t>(k - 1)] = U(rng) < 0.5 ? mag : -mag;
    }
    for (size_t i = 0; i < equalities.size(); ++i) {
        auto [a, b] = equalities[i].split_linear(solved[i]);
        double av = a.eval(x);
        if (av == 0) return std::nullopt;
        x[static_cast<size_t>(solved[i] - 1)] = -b.eval(x) / av;
    }
    for (const auto& [p, strict] : inequalities) {
        double v = p.eval(x);
        if (strict ? !(v > 0) : !(v >= 0)) return std::nullopt;
    }
    return x;
}

}  // namespace mspec
