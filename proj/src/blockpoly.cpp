#include "mspec/asymptotics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace mspec {

std::string coord_name(const Coord& c, const std::string& prefix) {
    std::string s = prefix + std::to_string(c.first);
    if (c.second != 1) s += "_" + std::to_string(c.second);
    return s;
}

std::string multi_index_str(const MultiIndex& a) {
    if (a.empty()) return "0";
    std::string s;
    for (const auto& [c, e] : a) {
        if (!s.empty()) s += "+";
        s += (e == 1 ? "" : std::to_string(e)) + "e" + std::to_string(c.first) +
             (c.second == 1 ? "" : "_" + std::to_string(c.second));
    }
    return s;
}

int block_length(const MultiIndex& a, int k) {
    int n = 0;
    for (const auto& [c, e] : a)
        if (c.first == k) n += e;
    return n;
}

Q factorial(const MultiIndex& a) {
    Z out = 1;
    for (const auto& [c, e] : a)
        for (int t = 2; t <= e; ++t) out *= t;
    return Q(out);
}

MultiIndex add(const MultiIndex& a, const MultiIndex& b) {
    MultiIndex out = a;
    for (const auto& [c, e] : b) out[c] += e;
    return out;
}

BlockPoly BlockPoly::constant(const Q& c) {
    BlockPoly p;
    if (c != 0) p.terms[{}] = c;
    return p;
}

BlockPoly BlockPoly::monomial(const MultiIndex& a, const Q& c) {
    BlockPoly p;
    if (c != 0) p.terms[a] = c;
    return p;
}

BlockPoly BlockPoly::operator+(const BlockPoly& o) const {
    BlockPoly out = *this;
    for (const auto& [a, c] : o.terms) {
        Q& t = out.terms[a];
        t += c;
        if (t == 0) out.terms.erase(a);
    }
    return out;
}

BlockPoly BlockPoly::operator-(const BlockPoly& o) const { return *this + o.scaled(-1); }

BlockPoly BlockPoly::operator*(const BlockPoly& o) const {
    BlockPoly out;
    for (const auto& [a, c] : terms)
        for (const auto& [b, d] : o.terms) out = out + monomial(add(a, b), c * d);
    return out;
}

BlockPoly BlockPoly::scaled(const Q& c) const {
    if (c == 0) return {};
    BlockPoly out = *this;
    for (auto& [a, t] : out.terms) t *= c;
    return out;
}

BlockPoly BlockPoly::derivative(const Coord& v) const {
    BlockPoly out;
    for (const auto& [a, c] : terms) {
        auto it = a.find(v);
        if (it == a.end()) continue;
        MultiIndex b = a;
        int e = it->second;
        if (e == 1) b.erase(v);
        else b[v] = e - 1;
        out = out + monomial(b, c * e);
    }
    return out;
}

BlockPoly BlockPoly::derivative(const MultiIndex& a) const {
    BlockPoly out = *this;
    for (const auto& [c, e] : a)
        for (int t = 0; t < e && !out.is_zero(); ++t) out = out.derivative(c);
    return out;
}

BlockPoly BlockPoly::restrict_zero(const std::set<int>& blocks) const {
    BlockPoly out;
    for (const auto& [a, c] : terms) {
        bool vanishes = false;
        for (const auto& [v, e] : a)
            if (blocks.count(v.first)) vanishes = true;
        if (!vanishes) out.terms[a] = c;
    }
    return out;
}

std::set<int> BlockPoly::blocks() const {
    std::set<int> out;
    for (const auto& [a, c] : terms)
        for (const auto& [v, e] : a) out.insert(v.first);
    return out;
}

int BlockPoly::max_exponent(const Coord& v) const {
    int n = 0;
    for (const auto& [a, c] : terms) {
        auto it = a.find(v);
        if (it != a.end()) n = std::max(n, it->second);
    }
    return n;
}

std::set<Coord> BlockPoly::coords() const {
    std::set<Coord> out;
    for (const auto& [a, c] : terms)
        for (const auto& [v, e] : a) out.insert(v);
    return out;
}

double BlockPoly::eval(const std::map<Coord, double>& z) const {
    double out = 0;
    for (const auto& [a, c] : terms) {
        double t = to_double(c);
        for (const auto& [v, e] : a) {
            auto it = z.find(v);
            t *= it == z.end() ? 0.0 : std::pow(it->second, e);
        }
        out += t;
    }
    return out;
}

std::string BlockPoly::str(const std::string& prefix) const {
    if (terms.empty()) return "0";
    // graded: total degree first, then the multi-index order
    std::vector<std::pair<MultiIndex, Q>> sorted(terms.begin(), terms.end());
    auto degree = [](const MultiIndex& a) {
        int n = 0;
        for (const auto& [v, e] : a) n += e;
        return n;
    };
    std::stable_sort(sorted.begin(), sorted.end(),
                     [&](const auto& x, const auto& y) { return degree(x.first) < degree(y.first); });
    std::string s;
    bool first = true;
    for (const auto& [a, c] : sorted) {
        Q mag = c < 0 ? Q(-c) : c;
        if (first) s += c < 0 ? "-" : "";
        else s += c < 0 ? " - " : " + ";
        first = false;
        std::string mono;
        for (const auto& [v, e] : a) {
            if (!mono.empty()) mono += "*";
            mono += coord_name(v, prefix);
            if (e != 1) mono += "^" + std::to_string(e);
        }
        if (mono.empty()) s += q_str(mag);
        else if (mag == 1) s += mono;
        else s += q_str(mag) + "*" + mono;
    }
    return s;
}

nlohmann::json to_json(const BlockPoly& p) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [a, c] : p.terms) {
        nlohmann::json alpha = nlohmann::json::array();
        for (const auto& [v, e] : a) alpha.push_back({{"block", v.first}, {"index", v.second}, {"exp", e}});
        terms.push_back({{"coeff", q_str(c)}, {"alpha", alpha}});
    }
    return {{"text", p.str()}, {"terms", terms}};
}

BlockPoly exp_truncation(const std::vector<int>& block_dims, int degree) {
    BlockPoly sum;
    for (size_t k = 0; k < block_dims.size(); ++k)
        for (int i = 1; i <= block_dims[k]; ++i) sum = sum + BlockPoly::monomial({{{static_cast<int>(k + 1), i}, 1}});
    // (sum)^n / n! collects every multi-index of length n with weight 1/a!
    BlockPoly out = BlockPoly::constant(1), power = BlockPoly::constant(1);
    Q fact = 1;
    for (int n = 1; n <= degree; ++n) {
        power = power * sum;
        fact *= n;
        out = out + power.scaled(1 / fact);
    }
    return out;
}

namespace {

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    BlockPoly parse() {
        BlockPoly p = expr();
        skip();
        if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw InputError(msg + " in polynomial '" + s_ + "'", "polynomial");
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
    bool digit() const { return i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_])); }
    int integer() {
        skip();
        size_t start = i_;
        while (digit()) ++i_;
        if (start == i_) fail("expected an integer");
        if (i_ - start > 6) fail("integer too large");
        return std::stoi(s_.substr(start, i_ - start));
    }

    BlockPoly expr() {
        BlockPoly p = term();
        for (;;) {
            if (eat('+')) p = p + term();
            else if (eat('-')) p = p - term();
            else return p;
        }
    }
    BlockPoly term() {
        BlockPoly p = unary();
        for (;;) {
            if (eat('*')) {
                p = p * unary();
            } else if (eat('/')) {
                BlockPoly q = unary();
                if (q.terms.size() != 1 || !q.terms.begin()->first.empty())
                    fail("division only by a nonzero constant");
                p = p.scaled(1 / q.terms.begin()->second);
            } else {
                return p;
            }
        }
    }
    BlockPoly unary() {
        if (eat('-')) return unary().scaled(-1);
        if (eat('+')) return unary();
        return power();
    }
    BlockPoly power() {
        BlockPoly base = atom();
        if (!eat('^')) return base;
        int n = integer();
        BlockPoly out = BlockPoly::constant(1);
        for (int t = 0; t < n; ++t) out = out * base;
        return out;
    }
    BlockPoly atom() {
        skip();
        if (eat('(')) {
            BlockPoly p = expr();
            if (!eat(')')) fail("missing ')'");
            return p;
        }
        if (i_ < s_.size() && (s_[i_] == 'z' || s_[i_] == 'x')) {
            ++i_;
            if (!digit()) fail("variable needs a block index");
            int k = integer();
            int idx = 1;
            if (i_ < s_.size() && s_[i_] == '_') {
                ++i_;
                idx = integer();
            }
            if (k < 1 || idx < 1) fail("indices start at 1");
            return BlockPoly::monomial({{{k, idx}, 1}});
        }
        if (digit()) {
            size_t start = i_;
            while (digit() || (i_ < s_.size() && s_[i_] == '.')) ++i_;
            return BlockPoly::constant(parse_q(s_.substr(start, i_ - start)));
        }
        fail("expected a number, variable or '('");
    }

    const std::string& s_;
    size_t i_ = 0;
};

}  // namespace

BlockPoly BlockPoly::parse(const std::string& text) { return Parser(text).parse(); }

}  // namespace mspec
