#include "mspec/levels.hpp"

#include "mspec/linalg.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace mspec {

using Kind = LevelExpr::Kind;

LevelExpr::LevelExpr(Kind k, std::vector<LevelExpr> kids, Q power)
    : kind_(k), kids_(std::move(kids)), power_(std::move(power)) {
    rekey();
}

void LevelExpr::rekey() {
    switch (kind_) {
        case Kind::Mono: key_ = "m[" + mono_.str() + "]"; return;
        case Kind::Pow: key_ = "pow(" + kids_[0].key_ + "," + q_str(power_) + ")"; return;
        default: break;
    }
    key_ = kind_ == Kind::Max ? "max(" : kind_ == Kind::Min ? "min(" : "prod(";
    for (size_t i = 0; i < kids_.size(); ++i) key_ += (i ? "," : "") + kids_[i].key_;
    key_ += ")";
}

bool LevelExpr::has_kind(VarKind k) const {
    if (kind_ == Kind::Mono) return mono_.has_kind(k);
    return std::any_of(kids_.begin(), kids_.end(), [&](const LevelExpr& c) { return c.has_kind(k); });
}

LevelExpr LevelExpr::extremum(Kind kind, std::vector<LevelExpr> xs) {
    if (xs.empty()) throw std::invalid_argument("max/min of an empty list");
    std::vector<LevelExpr> flat;
    for (auto& x : xs) {
        if (x.kind_ == kind)
            flat.insert(flat.end(), x.kids_.begin(), x.kids_.end());
        else
            flat.push_back(std::move(x));
    }
    std::sort(flat.begin(), flat.end());
    flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
    if (flat.size() == 1) return flat[0];
    return LevelExpr(kind, std::move(flat));
}

LevelExpr LevelExpr::max_of(std::vector<LevelExpr> xs) { return extremum(Kind::Max, std::move(xs)); }
LevelExpr LevelExpr::min_of(std::vector<LevelExpr> xs) { return extremum(Kind::Min, std::move(xs)); }

LevelExpr LevelExpr::prod(std::vector<LevelExpr> xs) {
    Monomial acc;
    std::vector<LevelExpr> rest;
    auto take = [&](const LevelExpr& x) {
        if (x.kind_ == Kind::Mono) {
            acc *= x.mono_;
            return;
        }
        // X * X^-1 cancels
        for (size_t i = 0; i < rest.size(); ++i) {
            const auto& y = rest[i];
            bool cancel = (x.kind_ == Kind::Pow && x.power_ == -1 && x.kids_[0] == y) ||
                          (y.kind_ == Kind::Pow && y.power_ == -1 && y.kids_[0] == x);
            if (cancel) {
                rest.erase(rest.begin() + long(i));
                return;
            }
        }
        rest.push_back(x);
    };
    for (const auto& x : xs) {
        if (x.kind_ == Kind::Prod)
            for (const auto& c : x.kids_) take(c);
        else
            take(x);
    }
    if (rest.empty()) return LevelExpr(acc);
    std::vector<LevelExpr> kids;
    if (!acc.is_one()) kids.emplace_back(acc);
    std::sort(rest.begin(), rest.end());
    kids.insert(kids.end(), rest.begin(), rest.end());
    if (kids.size() == 1) return kids[0];
    return LevelExpr(Kind::Prod, std::move(kids));
}

LevelExpr LevelExpr::pow(const LevelExpr& base, const Q& r) {
    if (r == 0) return one();
    if (r == 1) return base;
    switch (base.kind_) {
        case Kind::Mono: return LevelExpr(base.mono_.pow(r));
        case Kind::Pow: return pow(base.kids_[0], base.power_ * r);
        case Kind::Prod: {
            std::vector<LevelExpr> xs;
            for (const auto& c : base.kids_) xs.push_back(pow(c, r));
            return prod(std::move(xs));
        }
        case Kind::Max:
        case Kind::Min: break;
    }
    // positive powers move inside; a negative power stays as a reciprocal of the extremum
    if (r < 0) {
        if (r == -1) return LevelExpr(Kind::Pow, {base}, Q(-1));
        return pow(pow(base, -r), Q(-1));
    }
    std::vector<LevelExpr> xs;
    for (const auto& c : base.kids_) xs.push_back(pow(c, r));
    return extremum(base.kind_, std::move(xs));
}

namespace {

Monomial part(const Monomial& m, bool positive) {
    Monomial out;
    for (const auto& [v, e] : m.exponents())
        if ((e > 0) == positive) out.set(v, positive ? e : -e);
    return out;
}

bool compound(const Monomial& m) { return m.exponents().size() > 1; }

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
    std::string s;
    for (size_t i = 0; i < xs.size(); ++i) s += (i ? sep : "") + xs[i];
    return s;
}

}  // namespace

std::string LevelExpr::str(const VarNamer& namer) const {
    auto atom = [&](const LevelExpr& e) {
        if (e.kind_ == Kind::Max || e.kind_ == Kind::Min) return e.str(namer);
        if (e.kind_ == Kind::Mono && !compound(e.mono_) && e.mono_.exponents().begin()->second > 0) return e.str(namer);
        return "(" + e.str(namer) + ")";
    };
    switch (kind_) {
        case Kind::Mono: return mono_.pretty(namer);
        case Kind::Max:
        case Kind::Min: {
            std::vector<std::string> xs;
            for (const auto& c : kids_) xs.push_back(c.str(namer));
            return std::string(kind_ == Kind::Max ? "max(" : "min(") + join(xs, ", ") + ")";
        }
        case Kind::Pow:
            if (power_ == -1) return "1 / " + atom(kids_[0]);
            return atom(kids_[0]) + "^(" + q_str(power_) + ")";
        case Kind::Prod: break;
    }
    std::vector<std::string> up, down;
    bool down_compound = false;
    for (const auto& c : kids_) {
        if (c.kind_ == Kind::Mono) {
            Monomial u = part(c.mono_, true), d = part(c.mono_, false);
            if (!u.is_one()) up.push_back(u.pretty(namer));
            if (!d.is_one()) {
                down.push_back(d.pretty(namer));
                down_compound = down_compound || compound(d);
            }
        } else if (c.kind_ == Kind::Pow && c.power_ < 0) {
            Q a = -c.power_;
            down.push_back(a == 1 ? atom(c.kids_[0]) : atom(c.kids_[0]) + "^(" + q_str(a) + ")");
        } else {
            up.push_back(atom(c));
        }
    }
    std::string n = up.empty() ? "1" : join(up, " * ");
    if (down.empty()) return n;
    std::string d = join(down, " * ");
    if (down.size() > 1 || down_compound) d = "(" + d + ")";
    return n + " / " + d;
}

std::string LevelExpr::latex(const VarNamer& namer) const {
    switch (kind_) {
        case Kind::Mono: return mono_.latex(namer);
        case Kind::Max:
        case Kind::Min: {
            std::vector<std::string> xs;
            for (const auto& c : kids_) xs.push_back(c.latex(namer));
            return std::string(kind_ == Kind::Max ? "\\max\\{" : "\\min\\{") + join(xs, ", ") + "\\}";
        }
        case Kind::Pow:
            if (power_ == -1) return "\\frac{1}{" + kids_[0].latex(namer) + "}";
            return "\\left(" + kids_[0].latex(namer) + "\\right)^{" + q_str(power_) + "}";
        case Kind::Prod: break;
    }
    std::vector<std::string> up, down;
    for (const auto& c : kids_) {
        if (c.kind_ == Kind::Mono) {
            Monomial u = part(c.mono_, true), d = part(c.mono_, false);
            if (!u.is_one()) up.push_back(u.latex(namer));
            if (!d.is_one()) down.push_back(d.latex(namer));
        } else if (c.kind_ == Kind::Pow && c.power_ < 0) {
            down.push_back(pow(c.kids_[0], -c.power_).latex(namer));
        } else {
            up.push_back(c.latex(namer));
        }
    }
    std::string n = up.empty() ? "1" : join(up, " ");
    if (down.empty()) return n;
    return "\\frac{" + n + "}{" + join(down, " ") + "}";
}

nlohmann::json to_json(const LevelExpr& e) {
    using nlohmann::json;
    switch (e.kind()) {
        case Kind::Mono: return json{{"op", "mono"}, {"monomial", to_json(e.mono())}, {"text", e.mono().pretty()}};
        case Kind::Pow: return json{{"op", "pow"}, {"base", to_json(e.children()[0])}, {"exponent", q_str(e.power())}};
        default: break;
    }
    json args = json::array();
    for (const auto& c : e.children()) args.push_back(to_json(c));
    const char* op = e.kind() == Kind::Max ? "max" : e.kind() == Kind::Min ? "min" : "prod";
    return json{{"op", op}, {"args", args}};
}

LevelExpr level_from_json(const nlohmann::json& j) {
    std::string op = j.at("op").get<std::string>();
    if (op == "mono") return LevelExpr(monomial_from_json(j.at("monomial")));
    if (op == "pow") return LevelExpr::pow(level_from_json(j.at("base")), parse_q(j.at("exponent").get<std::string>()));
    std::vector<LevelExpr> xs;
    for (const auto& a : j.at("args")) xs.push_back(level_from_json(a));
    if (op == "max") return LevelExpr::max_of(std::move(xs));
    if (op == "min") return LevelExpr::min_of(std::move(xs));
    if (op == "prod") return LevelExpr::prod(std::move(xs));
    throw InputError("unknown level expression op: " + op, "op");
}

LevelExpr substitute(const LevelExpr& e, const std::map<int, LevelExpr>& values) {
    switch (e.kind()) {
        case Kind::Mono: {
            Monomial rest;
            std::vector<LevelExpr> factors;
            for (const auto& [v, x] : e.mono().exponents()) {
                auto it = v.kind == VarKind::Lambda ? values.find(v.index) : values.end();
                if (it == values.end())
                    rest.set(v, x);
                else
                    factors.push_back(LevelExpr::pow(it->second, x));
            }
            factors.emplace_back(rest);
            return LevelExpr::prod(std::move(factors));
        }
        case Kind::Pow: return LevelExpr::pow(substitute(e.children()[0], values), e.power());
        default: break;
    }
    std::vector<LevelExpr> xs;
    for (const auto& c : e.children()) xs.push_back(substitute(c, values));
    if (e.kind() == Kind::Max) return LevelExpr::max_of(std::move(xs));
    if (e.kind() == Kind::Min) return LevelExpr::min_of(std::move(xs));
    return LevelExpr::prod(std::move(xs));
}

LevelExpr sol_lambda(const Monomial& f, int j) {
    Q a = f.exponent(lambda_var(j));
    if (a >= 0) throw InputError("sol needs a negative exponent of lambda_" + std::to_string(j), "f");
    return LevelExpr(Monomial::lambda(j) * f.pow(1 / -a));
}

namespace {

void check_variables(const LevelExpr& e, const Model& md, int j) {
    if (e.has_kind(VarKind::XiNorm)) throw std::logic_error("level function carries a value variable");
    std::function<void(const LevelExpr&)> walk = [&](const LevelExpr& x) {
        if (x.kind() != Kind::Mono) {
            for (const auto& c : x.children()) walk(c);
            return;
        }
        for (const auto& [v, ex] : x.mono().exponents()) {
            if (v.kind == VarKind::Tau && !md.r.is_basis_col(v.index))
                throw std::logic_error("level function " + std::to_string(j) + " depends on a non-basis column");
            if (v.kind == VarKind::Lambda && (md.r.is_basis_row(v.index) || v.index <= j))
                throw std::logic_error("level function " + std::to_string(j) + " depends on an earlier lambda");
        }
    };
    walk(e);
}

}  // namespace

LevelFamily build_levels(const Model& md, const PipelineResult& pr) {
    auto zb = md.zero_basis_cols();
    if (!zb.empty())
        throw InputError("the point vanishes on basis column " + std::to_string(zb.front()) +
                             "; level functions need a point outside the fixed-point sets",
                         "point");
    LevelFamily fam;
    fam.ell = md.d.ell;
    auto other = md.r.other_rows();
    const GenSet* prev = &pr.G;
    for (size_t i = 0; i < other.size(); ++i) {
        int j = other[i];
        GenSet low;
        std::vector<LevelExpr> sols;
        for (const auto& p : *prev)
            if (p.f.exponent(lambda_var(j)) < 0) {
                low.insert(p);
                sols.push_back(sol_lambda(p.f, j));
            }
        LevelExpr rho = sols.empty() ? LevelExpr::one() : LevelExpr::max_of(std::move(sols));
        check_variables(rho, md, j);
        fam.rho_stages[j] = rho;
        fam.lower_sets[j] = std::move(low);
        prev = &pr.F0_stages.at(i).second;
    }
    // back substitution from the last action down
    std::map<int, LevelExpr> restricted;
    for (auto it = other.rbegin(); it != other.rend(); ++it) restricted[*it] = substitute(fam.rho_stages[*it], restricted);
    fam.rho_Lambda.resize(size_t(fam.ell));
    for (int j = 1; j <= fam.ell; ++j) {
        LevelExpr e = md.r.is_basis_row(j) ? substitute(LevelExpr(md.dm.phi_inv.at(j)), restricted) : restricted.at(j);
        if (e.has_kind(VarKind::Lambda)) throw std::logic_error("restricted level function still depends on lambda");
        check_variables(e, md, fam.ell);
        fam.rho_Lambda[size_t(j - 1)] = e;
    }
    for (int j = 1; j <= fam.ell; ++j) fam.strict.push_back(is_strict(fam, md.d, j));
    return fam;
}

LevelFamily build_levels(const Model& md) { return build_levels(md, run_pipeline(md)); }

Q effective_exponent(const LevelExpr& e, const std::map<int, Q>& scaling) {
    switch (e.kind()) {
        case Kind::Mono: {
            Q s = 0;
            for (const auto& [v, x] : e.mono().exponents()) {
                if (v.kind != VarKind::Tau) continue;
                auto it = scaling.find(v.index);
                if (it != scaling.end()) s += it->second * x;
            }
            return s;
        }
        case Kind::Pow: return e.power() * effective_exponent(e.children()[0], scaling);
        case Kind::Prod: {
            Q s = 0;
            for (const auto& c : e.children()) s += effective_exponent(c, scaling);
            return s;
        }
        case Kind::Max:
        case Kind::Min: break;
    }
    // as t -> 0+, a max is carried by its smallest t-exponent and a min by its largest
    Q best = effective_exponent(e.children()[0], scaling);
    for (size_t i = 1; i < e.children().size(); ++i) {
        Q x = effective_exponent(e.children()[i], scaling);
        best = e.kind() == Kind::Max ? std::min(best, x) : std::max(best, x);
    }
    return best;
}

Q exponent_bound(const LevelExpr& e, int k) {
    switch (e.kind()) {
        case Kind::Mono: return abs(e.mono().exponent(tau_var(k)));
        case Kind::Pow: return abs(e.power()) * exponent_bound(e.children()[0], k);
        default: break;
    }
    Q s = 0;
    for (const auto& c : e.children()) {
        Q x = exponent_bound(c, k);
        s = e.kind() == Kind::Prod ? s + x : std::max(s, x);
    }
    return s;
}

bool is_strict(const LevelFamily& fam, const Deformation& d, int j) {
    std::map<int, Q> scaling;
    for (int k = 1; k <= d.m; ++k) scaling[k] = d.a(j, k);
    return effective_exponent(fam.rho(j), scaling) > 0;
}

LevelFamily build_generalized_levels(const Deformation& d, const PointPattern& p, size_t max_perms) {
    const int ell = d.ell;
    const size_t L = rank(d.A);
    std::vector<int> theta(static_cast<size_t>(ell));
    std::iota(theta.begin(), theta.end(), 1);
    std::map<std::vector<int>, bool> independent;  // sorted leading rows -> rank test
    // orders with the same leading set and the same tail give the same family
    std::set<std::pair<std::vector<int>, std::vector<int>>> seen_orders;
    std::vector<std::vector<int>> orders;
    size_t count = 0;
    do {
        std::vector<int> lead(theta.begin(), theta.begin() + long(L));
        std::sort(lead.begin(), lead.end());
        auto it = independent.find(lead);
        if (it == independent.end()) {
            Matrix rows;
            for (int j : lead) rows.push_back(d.A[size_t(j - 1)]);
            it = independent.emplace(lead, rank(rows) == L).first;
        }
        if (!it->second) continue;
        if (++count > max_perms)
            throw InputError("more than " + std::to_string(max_perms) +
                                 " admissible action orders; raise the permutation limit",
                             "max_perms");
        std::vector<int> tail(theta.begin() + long(L), theta.end());
        if (seen_orders.insert({lead, tail}).second) orders.push_back(theta);
    } while (std::next_permutation(theta.begin(), theta.end()));

    LevelFamily out;
    out.ell = ell;
    std::vector<std::vector<LevelExpr>> candidates(static_cast<size_t>(ell));
    std::set<std::string> seen_families;
    for (const auto& th : orders) {
        Matrix A;
        for (int j : th) A.push_back(d.A[size_t(j - 1)]);
        Model md = Model::make(Deformation::make(A, d.block_dims), p);
        LevelFamily f = build_levels(md);
        // relabel: position i of the permuted order is action th[i]
        std::vector<LevelExpr> mapped(static_cast<size_t>(ell));
        for (int i = 0; i < ell; ++i) mapped[size_t(th[size_t(i)] - 1)] = f.rho_Lambda[size_t(i)];
        std::string key;
        for (const auto& e : mapped) key += e.key() + ";";
        if (!seen_families.insert(key).second) continue;
        out.permutations.push_back(th);
        for (int j = 0; j < ell; ++j) candidates[size_t(j)].push_back(mapped[size_t(j)]);
    }
    for (auto& c : candidates) out.rho_Lambda.push_back(LevelExpr::min_of(std::move(c)));
    for (int j = 1; j <= ell; ++j) {
        out.strict.push_back(is_strict(out, d, j));
        if (!out.strict.back())
            throw std::logic_error("generalized level functions: action " + std::to_string(j) + " is not strict");
    }
    return out;
}

double evaluate_level(const LevelExpr& e, const std::vector<double>& tau, const std::vector<double>& lambda) {
    for (double x : tau)
        if (!(x > 0)) throw InputError("level functions are evaluated at positive tau only", "tau");
    for (double x : lambda)
        if (!(x > 0)) throw InputError("level functions are evaluated at positive lambda only", "lambda");
    std::function<double(const LevelExpr&)> ev = [&](const LevelExpr& x) -> double {
        switch (x.kind()) {
            case Kind::Mono:
                return x.mono().evaluate([&](const VarId& v) {
                    const auto& src = v.kind == VarKind::Tau ? tau : lambda;
                    if (v.kind == VarKind::XiNorm || v.index > int(src.size()))
                        throw InputError("no value for " + default_var_name(v), "tau");
                    return src[size_t(v.index - 1)];
                });
            case Kind::Pow: return std::pow(ev(x.children()[0]), to_double(x.power()));
            case Kind::Prod: {
                double r = 1;
                for (const auto& c : x.children()) r *= ev(c);
                return r;
            }
            case Kind::Max:
            case Kind::Min: break;
        }
        double best = ev(x.children()[0]);
        for (size_t i = 1; i < x.children().size(); ++i) {
            double v = ev(x.children()[i]);
            best = x.kind() == Kind::Max ? std::max(best, v) : std::min(best, v);
        }
        return best;
    };
    return ev(e);
}

LevelExpr restrict_to_levels(const Monomial& f, const LevelFamily& fam) {
    std::map<int, LevelExpr> values;
    if (fam.rho_stages.empty()) {
        for (int j = 1; j <= fam.ell; ++j) values.emplace(j, fam.rho(j));
    } else {
        for (const auto& [j, e] : fam.rho_stages) values.emplace(j, fam.rho(j));
    }
    return substitute(LevelExpr(f), values);
}

nlohmann::json to_json(const LevelFamily& fam) {
    using nlohmann::json;
    json rho = json::array();
    for (int j = 1; j <= fam.ell; ++j)
        rho.push_back({{"j", j},
                       {"text", fam.rho(j).str()},
                       {"tree", to_json(fam.rho(j))},
                       {"strict", j <= int(fam.strict.size()) ? bool(fam.strict[size_t(j - 1)]) : false}});
    json stages = json::array();
    for (const auto& [j, e] : fam.rho_stages)
        stages.push_back({{"j", j}, {"text", e.str()}, {"lower_set", to_json(fam.lower_sets.at(j))}});
    json out{{"ell", fam.ell}, {"rho", rho}, {"stages", stages}};
    if (!fam.permutations.empty()) out["permutations"] = fam.permutations;
    return out;
}

}  // namespace mspec

namespace mspec {

namespace {

class LevelParser {
public:
    explicit LevelParser(const std::string& s) : s_(s) {}

    LevelExpr parse() {
        LevelExpr e = expr();
        skip();
        if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw InputError(msg + " in level expression '" + s_ + "'", "level-expression");
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
        return std::stoi(s_.substr(start, i_ - start));
    }

    LevelExpr expr() {
        std::vector<LevelExpr> factors{power()};
        for (;;) {
            if (eat('*')) factors.push_back(power());
            else if (eat('/')) factors.push_back(LevelExpr::pow(power(), -1));
            else return LevelExpr::prod(std::move(factors));
        }
    }
    Q exponent() {
        if (eat('(')) {
            bool neg = eat('-');
            Q r = integer();
            if (eat('/')) r /= integer();
            if (!eat(')')) fail("missing ')'");
            return neg ? Q(-r) : r;
        }
        bool neg = eat('-');
        Q r = integer();
        return neg ? Q(-r) : r;
    }
    LevelExpr power() {
        LevelExpr base = atom();
        if (eat('^')) return LevelExpr::pow(base, exponent());
        return base;
    }
    LevelExpr atom() {
        skip();
        if (eat('(')) {
            LevelExpr e = expr();
            if (!eat(')')) fail("missing ')'");
            return e;
        }
        for (const char* name : {"max", "min"}) {
            if (s_.compare(i_, 3, name) == 0) {
                i_ += 3;
                if (!eat('(')) fail("expected '(' after " + std::string(name));
                std::vector<LevelExpr> xs{expr()};
                while (eat(',')) xs.push_back(expr());
                if (!eat(')')) fail("missing ')'");
                return name[1] == 'a' ? LevelExpr::max_of(std::move(xs)) : LevelExpr::min_of(std::move(xs));
            }
        }
        if (digit()) {
            if (integer() != 1) fail("only the constant 1 is allowed");
            return LevelExpr::one();
        }
        if (i_ < s_.size() && (s_[i_] == 't' || s_[i_] == 'l')) {
            const char c = s_[i_++];
            const int k = integer();
            return LevelExpr(c == 't' ? Monomial::tau(k) : Monomial::lambda(k));
        }
        fail("expected a variable, max, min or '('");
    }

    const std::string& s_;
    size_t i_ = 0;
};

bool extremum(const LevelExpr& e) {
    return e.kind() == LevelExpr::Kind::Max || e.kind() == LevelExpr::Kind::Min;
}

LevelExpr spread(const LevelExpr& ext, const Monomial& m) {
    std::vector<LevelExpr> xs;
    for (const auto& c : ext.children()) xs.push_back(absorb_factors(LevelExpr::prod({LevelExpr(m), c})));
    return ext.kind() == LevelExpr::Kind::Max ? LevelExpr::max_of(std::move(xs)) : LevelExpr::min_of(std::move(xs));
}

}  // namespace

LevelExpr parse_level(const std::string& text) { return LevelParser(text).parse(); }

LevelExpr absorb_factors(const LevelExpr& e) {
    switch (e.kind()) {
        case LevelExpr::Kind::Mono: return e;
        case LevelExpr::Kind::Pow: return LevelExpr::pow(absorb_factors(e.children()[0]), e.power());
        case LevelExpr::Kind::Max:
        case LevelExpr::Kind::Min: {
            std::vector<LevelExpr> xs;
            for (const auto& c : e.children()) xs.push_back(absorb_factors(c));
            return e.kind() == LevelExpr::Kind::Max ? LevelExpr::max_of(std::move(xs))
                                                    : LevelExpr::min_of(std::move(xs));
        }
        case LevelExpr::Kind::Prod: break;
    }
    Monomial m;
    std::vector<LevelExpr> rest;
    for (const auto& c : e.children()) {
        LevelExpr x = absorb_factors(c);
        if (x.kind() == LevelExpr::Kind::Mono) m *= x.mono();
        else rest.push_back(std::move(x));
    }
    if (m.is_one() || rest.empty()) return LevelExpr::prod(std::move(rest));
    // the monomial goes into the first factor that can take it
    for (auto& x : rest) {
        if (extremum(x)) {
            x = spread(x, m);
            return LevelExpr::prod(std::move(rest));
        }
        if (x.kind() == LevelExpr::Kind::Pow && extremum(x.children()[0])) {
            x = LevelExpr::pow(spread(x.children()[0], m.pow(1 / x.power())), x.power());
            return LevelExpr::prod(std::move(rest));
        }
    }
    rest.emplace_back(m);
    return LevelExpr::prod(std::move(rest));
}

}  // namespace mspec
