#include "mspec/cone.hpp"

#include "mspec/linalg.hpp"
#include "mspec/lp.hpp"

#include <algorithm>
#include <set>

namespace mspec {

namespace {

Vec axpy(const Vec& x, const Q& a, const Vec& y) {
    Vec r = x;
    for (size_t i = 0; i < r.size(); ++i) r[i] += a * y[i];
    return r;
}

bool is_zero(const Vec& v) {
    for (const auto& q : v)
        if (q != 0) return false;
    return true;
}

void cut(ConeGenerators& g, const Vec& h, bool equality) {
    // use a line not orthogonal to h when there is one
    for (size_t li = 0; li < g.lines.size(); ++li) {
        Q hl = dot(h, g.lines[li]);
        if (hl == 0) continue;
        Vec l = g.lines[li];
        if (hl < 0) {
            for (auto& x : l) x = -x;
            hl = -hl;
        }
        g.lines.erase(g.lines.begin() + long(li));
        for (auto& other : g.lines) other = axpy(other, -dot(h, other) / hl, l);
        for (auto& r : g.rays) r = axpy(r, -dot(h, r) / hl, l);
        if (!equality) g.rays.push_back(l);
        return;
    }
    Matrix pos, neg, zero;
    for (const auto& r : g.rays) {
        int s = sign(dot(h, r));
        (s > 0 ? pos : s < 0 ? neg : zero).push_back(r);
    }
    Matrix next = zero;
    if (!equality) next.insert(next.end(), pos.begin(), pos.end());
    for (const auto& p : pos)
        for (const auto& n : neg) {
            Q hp = dot(h, p), hn = dot(h, n);
            // hp * n - hn * p lies on the hyperplane
            Vec c(p.size());
            for (size_t i = 0; i < c.size(); ++i) c[i] = hp * n[i] - hn * p[i];
            if (!is_zero(c)) next.push_back(c);
        }
    g.rays = std::move(next);
}

void prune(ConeGenerators& g) {
    std::set<Vec> seen;
    Matrix uniq;
    for (const auto& r : g.rays) {
        if (is_zero(r)) continue;
        Vec p = primitive(r);
        if (seen.insert(p).second) uniq.push_back(p);
    }
    Matrix kept;
    for (size_t i = 0; i < uniq.size(); ++i) {
        Matrix others;
        for (size_t j = 0; j < uniq.size(); ++j)
            if (j != i && (j > i || std::find(kept.begin(), kept.end(), uniq[j]) != kept.end()))
                others.push_back(uniq[j]);
        if (!lp::in_cone(others, g.lines, uniq[i])) kept.push_back(uniq[i]);
    }
    g.rays = std::move(kept);
    for (auto& l : g.lines) l = primitive(l);
}

}  // namespace

ConeGenerators cone_generators(size_t n, const Matrix& ineq, const Matrix& eq) {
    ConeGenerators g;
    g.lines = identity(n);
    for (const auto& h : eq) cut(g, h, true);
    for (const auto& h : ineq) {
        cut(g, h, false);
        prune(g);
    }
    prune(g);
    return g;
}

}  // namespace mspec
