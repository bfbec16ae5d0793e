#include "mspec/multicone.hpp"

#include "mspec/lp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

namespace mspec {

namespace {

double value_number(const Value& v, const PointPattern& p) {
    if (v.is_zero()) return 0.0;
    return v.mono().evaluate([&](const VarId& id) {
        if (id.kind != VarKind::XiNorm) throw std::logic_error("value depends on " + default_var_name(id));
        return p.norm(id.index);
    });
}

// f at block norms; a vanishing norm under a negative exponent gives +inf
double mono_at(const Monomial& f, const std::vector<double>& norms) {
    double out = 1.0;
    for (const auto& [id, e] : f.exponents()) {
        if (id.kind != VarKind::Tau) throw std::logic_error("inequality depends on " + default_var_name(id));
        double x = norms.at(static_cast<size_t>(id.index - 1));
        double ed = to_double(e);
        if (x == 0.0) {
            if (ed < 0) return std::numeric_limits<double>::infinity();
            out = 0.0;
            continue;
        }
        out *= std::pow(x, ed);
    }
    return out;
}

std::pair<Monomial, Monomial> split_signs(const Monomial& f) {
    Monomial pos, neg;
    for (const auto& [id, e] : f.exponents()) {
        if (e > 0) pos.set(id, e);
        else neg.set(id, -e);
    }
    return {pos, neg};
}

std::string block_name(const VarId& v) {
    if (v.kind == VarKind::Tau) return "|z" + std::to_string(v.index) + "|";
    return default_var_name(v);
}

std::string eps_name(int slot) { return slot == 0 ? "eps" : "eps" + std::to_string(slot); }

// product display: x^p factors joined by '*', "1" when empty
std::string power_product(const Monomial& f, const Z& scale) {
    if (f.is_one()) return "1";
    std::string out;
    for (const auto& [id, e] : f.exponents()) {
        if (!out.empty()) out += "*";
        out += block_name(id);
        Q p = e * Q(scale);
        if (p != 1) out += "^" + (is_integer(p) ? q_str(p) : "(" + q_str(p) + ")");
    }
    return out;
}

std::string bound_product(const std::vector<BoundFactor>& bound, const Z& scale, bool upper) {
    std::vector<std::string> parts;
    for (const auto& b : bound) {
        std::string base = b.v.is_zero() ? eps_name(b.slot)
                                         : "(" + b.v.str() + (upper ? " + " : " - ") + eps_name(b.slot) + ")";
        Q p = b.power * Q(scale);
        if (p != 1) base += "^" + (is_integer(p) ? q_str(p) : "(" + q_str(p) + ")");
        parts.push_back(base);
    }
    std::string out;
    for (const auto& s : parts) out += (out.empty() ? "" : "*") + s;
    return out.empty() ? "1" : out;
}

Z clearing_scale(const Monomial& f, const std::vector<BoundFactor>& bound) {
    std::vector<Q> qs;
    for (const auto& [id, e] : f.exponents()) qs.push_back(e);
    for (const auto& b : bound) qs.push_back(b.power);
    return common_denominator(qs);
}

std::string join_product(const std::string& a, const std::string& b) {
    if (b == "1") return a;
    if (a == "1") return b;
    return a + "*" + b;
}

// (v + eps_s)^a (v + eps_s)^b -> (v + eps_s)^(a+b)
std::vector<BoundFactor> merge_factors(const std::vector<BoundFactor>& in) {
    std::map<std::pair<Value, int>, Q> acc;
    for (const auto& b : in) acc[{b.v, b.slot}] += b.power;
    std::vector<BoundFactor> out;
    for (const auto& [key, pw] : acc)
        if (pw != 0) out.push_back(BoundFactor{key.first, key.second, pw});
    return out;
}

bool block_ok(const BlockPoint& z, int k) {
    return z.in_cone.empty() || z.in_cone.at(static_cast<size_t>(k - 1));
}

}  // namespace

double EpsValues::minus(int slot) const {
    if (slot == 0) return eps;
    auto it = per_slot.find(slot);
    return it == per_slot.end() ? eps : it->second.first;
}

double EpsValues::plus(int slot) const {
    if (slot == 0) return eps;
    auto it = per_slot.find(slot);
    return it == per_slot.end() ? eps : it->second.second;
}

bool q_closed(const GenSet& H) {
    for (const auto& g : H) {
        if (g.v.is_zero()) continue;
        if (!H.count(GenPair(g.f.inverse(), g.v.inverse()))) return false;
    }
    return true;
}

MulticoneSystem build_multicone(const Model& md, const PipelineResult& pr, EpsMode mode, bool check_equivalence) {
    if (check_equivalence) {
        Verdict v = equivalent(pr.Fq, calG_generators(md));
        if (v == Verdict::No) throw InputError("[F^q] is not equivalent to the G-semigroup", "pipeline");
    }
    MulticoneSystem s;
    s.m = md.d.m;
    s.H = pr.Fq;
    s.eps_mode = mode;
    s.has_x0 = true;
    s.point = md.p;
    s.actions = md.d.A;
    for (int k = 1; k <= s.m; ++k) s.cones[k] = ConeFactor{md.zero(k), 0.5};

    int slot = 0;
    for (const auto& g : s.H) {
        ++slot;
        if (g.f.is_one()) continue;  // the unit pair gives 1 - eps < 1 < 1 + eps
        for (int k : md.p.zero_blocks)
            if (g.f.exponent(tau_var(k)) < 0)
                throw std::logic_error("generator " + g.str() + " has a negative exponent on a vanishing block");
        MulticoneInequality q;
        q.f = g.f;
        q.v = g.v;
        q.two_sided = !g.v.is_zero();
        q.bound.push_back(BoundFactor{g.v, mode == EpsMode::Single ? 0 : slot, Q(1)});
        s.inequalities.push_back(std::move(q));
    }
    return s;
}

MulticoneSystem to_one_sided(const MulticoneSystem& s) {
    if (!q_closed(s.H)) throw InputError("the one-sided form needs Q(H) = H", "one-sided");
    MulticoneSystem out = s;
    out.one_sided = true;
    for (auto& q : out.inequalities) q.two_sided = false;
    return out;
}

double bound_value(const std::vector<BoundFactor>& bound, const PointPattern& p, const EpsValues& eps, bool upper) {
    double out = 1.0;
    for (const auto& b : bound) {
        double base = value_number(b.v, p) + (upper ? eps.plus(b.slot) : -eps.minus(b.slot));
        // lower bounds with v_i <= eps carry no information for norms
        if (!upper && base <= 0) return 0.0;
        out *= std::pow(base, to_double(b.power));
    }
    return out;
}

bool member(const MulticoneSystem& s, const BlockPoint& z, const EpsValues& eps) {
    if (s.has_x0 && !(z.x0 < eps.eps0)) return false;
    for (int k = 1; k <= s.m; ++k)
        if (!s.removed.count(k) && !block_ok(z, k)) return false;
    for (const auto& q : s.inequalities) {
        double f = mono_at(q.f, z.norms);
        if (!(f < bound_value(q.bound, s.point, eps, true))) return false;
        if (q.two_sided) {
            double lo = bound_value(q.bound, s.point, eps, false);
            if (lo > 0 && !(lo < f)) return false;
        }
    }
    return true;
}

std::string inequality_str(const MulticoneInequality& q, const VarNamer&) {
    auto [fn, fd] = split_signs(q.f);
    Z N = clearing_scale(q.f, q.bound);
    std::string lhs = power_product(fn, N);
    std::string up = join_product(bound_product(q.bound, N, true), power_product(fd, N));
    if (!q.two_sided) return lhs + " < " + up;
    std::string lo = join_product(bound_product(q.bound, N, false), power_product(fd, N));
    return lo + " < " + lhs + " < " + up;
}

std::string system_str(const MulticoneSystem& s) {
    std::ostringstream os;
    for (int k = 1; k <= s.m; ++k) {
        if (s.removed.count(k)) continue;
        const auto& c = s.cones.at(k);
        if (!c.full_space) os << "z" << k << " in W" << k << "\n";
    }
    if (s.has_x0) os << "|z0| < eps0\n";
    for (const auto& q : s.inequalities) os << inequality_str(q) << "\n";
    return os.str();
}

nlohmann::json to_json(const MulticoneSystem& s) {
    nlohmann::json j;
    j["m"] = s.m;
    j["eps_mode"] = s.eps_mode == EpsMode::Single ? "single" : "per-pair";
    j["one_sided"] = s.one_sided;
    j["has_x0"] = s.has_x0;
    j["H"] = to_json(s.H);
    j["removed"] = s.removed;
    j["cones"] = nlohmann::json::array();
    for (const auto& [k, c] : s.cones)
        j["cones"].push_back({{"block", k}, {"full_space", c.full_space}, {"half_aperture", c.half_aperture}});
    j["inequalities"] = nlohmann::json::array();
    for (const auto& q : s.inequalities) {
        nlohmann::json b = nlohmann::json::array();
        for (const auto& f : q.bound) b.push_back({{"v", to_json(f.v)}, {"slot", f.slot}, {"power", q_str(f.power)}});
        j["inequalities"].push_back({{"f", to_json(q.f)},
                                     {"v", to_json(q.v)},
                                     {"two_sided", q.two_sided},
                                     {"bound", b},
                                     {"text", inequality_str(q)}});
    }
    return j;
}

// ---- closure ----

namespace {

std::vector<BoundFactor> closure_bound(const std::map<int, Q>& factors, const std::vector<GenPair>& fq) {
    std::vector<BoundFactor> out;
    for (const auto& [i, a] : factors) out.push_back(BoundFactor{fq[static_cast<size_t>(i)].v, 0, a});
    return merge_factors(out);
}

std::map<int, Q> add_factors(const std::map<int, Q>& x, const Q& a, const std::map<int, Q>& y, const Q& b) {
    std::map<int, Q> out;
    for (const auto& [i, e] : x) out[i] += a * e;
    for (const auto& [i, e] : y) out[i] += b * e;
    return out;
}

// no exponent of x and y points in opposite directions
bool cancellation_free(const Monomial& x, const Monomial& y) {
    for (const auto& [id, e] : x.exponents()) {
        Q o = y.exponent(id);
        if ((e > 0 && o < 0) || (e < 0 && o > 0)) return false;
    }
    return true;
}

}  // namespace

ClosureSystem closure(const Model& md, const PipelineResult& pr, size_t cap) {
    ClosureSystem c;
    c.Fq = pr.Fq;
    c.point = md.p;
    std::vector<GenPair> fq(pr.Fq.begin(), pr.Fq.end());

    std::map<GenPair, size_t> index;
    std::deque<size_t> queue;
    auto push = [&](ClosureElement e) {
        if (index.count(e.pair)) return;
        if (c.K.size() >= cap) {
            c.cap_hit = true;
            throw std::runtime_error("star-closure exceeded " + std::to_string(cap) + " elements");
        }
        index[e.pair] = c.K.size();
        queue.push_back(c.K.size());
        c.K.push_back(std::move(e));
    };
    for (size_t i = 0; i < fq.size(); ++i) push(ClosureElement{fq[i], {{static_cast<int>(i), Q(1)}}});

    std::vector<Monomial> vars;
    for (const auto& g : fq)
        for (const auto& [id, e] : g.f.exponents()) vars.push_back(Monomial::var(id));
    auto only_eps = [&](const std::map<int, Q>& factors) {
        return std::all_of(factors.begin(), factors.end(),
                           [&](const auto& kv) { return fq[static_cast<size_t>(kv.first)].v.is_zero(); });
    };
    auto total = [](const std::map<int, Q>& factors) {
        Q t = 0;
        for (const auto& [i, a] : factors) t += a;
        return t;
    };
    // f <= eps^S follows from sign-compatible elements e_i <= eps^{S_i} when f = prod e_i^{c_i} and
    // sum c_i S_i >= S (eps <= 1)
    auto dominated = [&](const Monomial& f, const std::map<int, Q>& factors) {
        if (!only_eps(factors)) return false;
        std::vector<const ClosureElement*> use;
        for (const auto& e : c.K) {
            if (!e.pair.v.is_zero() || !only_eps(e.factors) || e.pair.f.is_one()) continue;
            bool ok = true;
            for (const auto& [id, x] : e.pair.f.exponents()) {
                Q y = f.exponent(id);
                if (y == 0 || (x > 0) != (y > 0)) ok = false;
            }
            if (ok) use.push_back(&e);
        }
        if (use.empty()) return false;
        lp::Problem prob(use.size());
        std::set<VarId> ids;
        for (const auto& v : vars) ids.insert(v.exponents().begin()->first);
        for (const auto& id : ids) {
            Vec row(use.size());
            for (size_t i = 0; i < use.size(); ++i) row[i] = use[i]->pair.f.exponent(id);
            prob.add(row, lp::Sense::EQ, f.exponent(id));
        }
        Vec srow(use.size());
        for (size_t i = 0; i < use.size(); ++i) srow[i] = total(use[i]->factors);
        prob.add(srow, lp::Sense::GE, total(factors));
        return lp::feasible(prob);
    };

    // a power of an element, or a product of two elements without cancellation, adds no new inequality
    auto implied = [&](const Monomial& f, const std::map<int, Q>& factors) {
        if (dominated(f, factors)) return true;
        for (const auto& e : c.K) {
            if (e.pair.f.is_one() || f.is_one()) continue;
            const auto& [id, ef] = *e.pair.f.exponents().begin();
            Q r = f.exponent(id) / ef;
            if (r > 0 && e.pair.f.pow(r) == f && add_factors(e.factors, r, {}, 0) == factors) return true;
        }
        for (size_t x = 0; x < c.K.size(); ++x)
            for (size_t y = x; y < c.K.size(); ++y) {
                const auto& ex = c.K[x];
                const auto& ey = c.K[y];
                if (!(ex.pair.f * ey.pair.f == f)) continue;
                if (add_factors(ex.factors, 1, ey.factors, 1) != factors) continue;
                if (cancellation_free(ex.pair.f, ey.pair.f)) return true;
            }
        return false;
    };

    const auto& cols = md.r.basis_cols;
    while (!queue.empty()) {
        size_t cur = queue.front();
        queue.pop_front();
        for (size_t other = 0; other <= cur; ++other) {
            for (int k : cols) {
                for (int dir = 0; dir < 2; ++dir) {
                    const auto& P = dir == 0 ? c.K[cur] : c.K[other];
                    const auto& N = dir == 0 ? c.K[other] : c.K[cur];
                    Q ep = P.pair.f.exponent(tau_var(k));
                    Q en = N.pair.f.exponent(tau_var(k));
                    if (!(ep > 0 && en < 0)) continue;
                    auto [a, b] = balance(ep, -en);
                    GenPair prod = pair_pow(P.pair, Q(a)) * pair_pow(N.pair, Q(b));
                    if (index.count(prod)) continue;
                    auto factors = add_factors(P.factors, Q(a), N.factors, Q(b));
                    if (implied(prod.f, factors)) continue;
                    push(ClosureElement{prod, factors});
                }
            }
        }
    }

    for (const auto& e : c.K) {
        auto [fn, fd] = split_signs(e.pair.f);
        c.inequalities.push_back(ClosedInequality{fn, fd, e.pair.v, closure_bound(e.factors, fq)});
    }
    return c;
}

bool member_closed(const ClosureSystem& c, const BlockPoint& z, const EpsValues& eps) {
    for (size_t k = 0; k < z.in_cone.size(); ++k)
        if (!z.in_cone[k]) return false;
    for (const auto& q : c.inequalities) {
        double n = mono_at(q.numerator, z.norms);
        double d = mono_at(q.denominator, z.norms);
        if (!(n <= bound_value(q.bound, c.point, eps, true) * d)) return false;
        if (!q.v.is_zero()) {
            double lo = bound_value(q.bound, c.point, eps, false);
            if (!(lo * d <= n)) return false;
        }
    }
    return true;
}

std::string closed_inequality_str(const ClosedInequality& q) {
    std::vector<Q> qs;
    for (const auto& [id, e] : q.numerator.exponents()) qs.push_back(e);
    for (const auto& [id, e] : q.denominator.exponents()) qs.push_back(e);
    for (const auto& b : q.bound) qs.push_back(b.power);
    Z N = common_denominator(qs);
    std::string n = power_product(q.numerator, N);
    std::string up = join_product(bound_product(q.bound, N, true), power_product(q.denominator, N));
    if (q.v.is_zero()) return n + " <= " + up;
    std::string lo = join_product(bound_product(q.bound, N, false), power_product(q.denominator, N));
    return lo + " <= " + n + " <= " + up;
}

// ---- projection ----

MulticoneSystem project(const MulticoneSystem& s, int k, bool k_zero) {
    if (!s.one_sided) throw InputError("projection needs the one-sided form", "one-sided");
    if (k < 1 || k > s.m || s.removed.count(k)) throw InputError("block " + std::to_string(k) + " is not present", "block");
    MulticoneSystem out = s;
    out.removed.insert(k);
    out.cones.erase(k);
    out.inequalities.clear();

    std::vector<const MulticoneInequality*> neg, pos;
    for (const auto& q : s.inequalities) {
        Q e = q.f.exponent(tau_var(k));
        if (e == 0) out.inequalities.push_back(q);
        else if (e < 0) neg.push_back(&q);
        else pos.push_back(&q);
    }
    // a vanishing block with no negative exponent: tau_k = 0 satisfies every positive row
    if (k_zero && neg.empty()) return out;
    for (const auto* g : neg) {
        for (const auto* h : pos) {
            auto [a, b] = balance(-g->f.exponent(tau_var(k)), h->f.exponent(tau_var(k)));
            MulticoneInequality q;
            q.f = g->f.pow(Q(a)) * h->f.pow(Q(b));
            q.v = g->v.pow(Q(a)) * h->v.pow(Q(b));
            for (auto bf : g->bound) {
                bf.power *= Q(a);
                q.bound.push_back(bf);
            }
            for (auto bf : h->bound) {
                bf.power *= Q(b);
                q.bound.push_back(bf);
            }
            q.bound = merge_factors(q.bound);
            out.inequalities.push_back(std::move(q));
        }
    }
    return out;
}

// ---- sampling and contraction ----

BlockPoint act(const MulticoneSystem& s, const BlockPoint& z, const std::vector<double>& lambda) {
    BlockPoint out = z;
    for (size_t j = 0; j < s.actions.size(); ++j)
        for (int k = 1; k <= s.m; ++k) {
            const Q& a = s.actions[j][static_cast<size_t>(k - 1)];
            if (a != 0) out.norms[static_cast<size_t>(k - 1)] *= std::pow(lambda.at(j), to_double(a));
        }
    return out;
}

std::optional<BlockPoint> sample_member(const MulticoneSystem& s, const EpsValues& eps, std::mt19937_64& rng,
                                        int attempts, double depth) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const size_t ell = s.actions.size();
    for (int t = 0; t < attempts; ++t) {
        std::vector<double> lambda(ell);
        for (auto& l : lambda) l = std::pow(10.0, -depth * U(rng));
        BlockPoint z;
        z.norms.assign(static_cast<size_t>(s.m), 1.0);
        for (int k = 1; k <= s.m; ++k) {
            double c = s.point.is_zero(k) ? std::pow(10.0, -6.0 * U(rng))
                                          : s.point.norm(k) * std::pow(10.0, 0.04 * (U(rng) - 0.5));
            z.norms[static_cast<size_t>(k - 1)] = c;
        }
        z = act(s, z, lambda);
        z.x0 = eps.eps0 * U(rng);
        if (member(s, z, eps)) return z;
    }
    return std::nullopt;
}

ContractionReport contraction_stable_check(const MulticoneSystem& s, const EpsValues& eps, int samples,
                                           std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    ContractionReport rep;
    while (rep.samples < samples) {
        auto z = sample_member(s, eps, rng, 1);
        if (!z) {
            ++rep.rejected;
            if (rep.rejected > 1000 * std::max(samples, 1)) break;
            continue;
        }
        ++rep.samples;
        std::vector<double> lambda(s.actions.size());
        for (auto& l : lambda) l = 1.0 - U(rng);  // (0, 1]
        if (member(s, act(s, *z, lambda), eps)) ++rep.passed;
        else ++rep.failed;
    }
    return rep;
}

// ---- normal cone probe ----

std::string to_string(ProbeVerdict v) {
    switch (v) {
        case ProbeVerdict::InCone: return "InCone";
        case ProbeVerdict::NotInCone: return "NotInCone";
        case ProbeVerdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

BlockPoint to_block_point(const std::vector<double>& x, const MulticoneSystem& s, const std::vector<int>& direction) {
    BlockPoint z;
    z.norms.resize(x.size());
    z.in_cone.resize(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        int k = static_cast<int>(i) + 1;
        z.norms[i] = std::fabs(x[i]);
        if (s.point.is_zero(k)) {
            z.in_cone[i] = true;
            continue;
        }
        int dir = i < direction.size() ? direction[i] : 1;
        z.in_cone[i] = x[i] != 0 && ((x[i] > 0) == (dir > 0));
    }
    return z;
}

ProbeResult normal_cone_probe(const Model& md, const PointSet& Z, const std::vector<int>& direction,
                              const std::vector<double>& eps_schedule, const std::vector<double>& ball_schedule,
                              int samples, std::uint64_t seed) {
    ProbeResult res;
    if (Z.empty) {
        res.verdict = ProbeVerdict::NotInCone;
        res.eps = eps_schedule.empty() ? 0 : eps_schedule.front();
        res.radius = ball_schedule.empty() ? 0 : ball_schedule.front();
        return res;
    }
    auto pr = run_pipeline(md);
    auto s = build_multicone(md, pr);
    std::mt19937_64 rng(seed);
    const int min_valid = 50;
    bool inconclusive = false;
    for (double e : eps_schedule) {
        EpsValues eps;
        eps.eps = e;
        eps.eps0 = e;
        for (double r : ball_schedule) {
            int valid = 0, hits = 0;
            for (int t = 0; t < samples; ++t) {
                auto x = Z.sample(rng, r);
                if (!x) continue;
                bool inside = std::all_of(x->begin(), x->end(), [&](double v) { return std::fabs(v) < r; });
                if (!inside) continue;
                ++valid;
                if (member(s, to_block_point(*x, s, direction), eps)) ++hits;
            }
            res.hits += hits;
            res.z_samples += valid;
            if (valid < min_valid) {
                inconclusive = true;
                continue;
            }
            if (hits == 0) {
                res.verdict = ProbeVerdict::NotInCone;
                res.eps = e;
                res.radius = r;
                return res;
            }
        }
    }
    res.verdict = inconclusive ? ProbeVerdict::Inconclusive : ProbeVerdict::InCone;
    return res;
}

}  // namespace mspec
