// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "mspec/asymptotics.hpp"
#include "mspec/levels.hpp"
#include "mspec/multicone.hpp"
#include "mspec/report.hpp"
#include "mspec/restriction.hpp"
#include "mspec/semigroup.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace mspec;

namespace {

struct Outcome {
    bool ok = true;
    std::vector<std::string> notes;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (notes.size() < 8) notes.push_back(what);
        }
    }
};

const std::vector<FixtureCase>& corpus() {
    static const std::vector<FixtureCase> all = load_fixtures(default_fixture_dir());
    return all;
}

void run_group(Outcome& out, const std::string& group) {
    const auto cases = filter_fixtures(corpus(), group);
    out.require(!cases.empty(), "no fixtures in group " + group);
    for (const auto& c : cases) {
        const auto r = run_fixture(c);
        std::string detail = r.error;
        for (const auto& k : r.checks)
            if (!k.ok) detail += " " + k.path + ": " + k.detail;
        out.require(r.ok, c.name + ":" + detail);
    }
}

Model normal_model(const Matrix& A, std::set<int> zeros = {}) {
    PointPattern p;
    p.zero_blocks = std::move(zeros);
    p.normalized = true;
    return Model::make(Deformation::make(A), p);
}

const Matrix kTransversal2{{1, 0}, {0, 1}};
const Matrix kFlag2{{1, 1}, {0, 1}};
const Matrix kCusp{{3, 2}, {1, 1}};
const Matrix kChain{{1, 1, 0}, {0, 1, 1}};
const Matrix kTransversal3{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
const Matrix kFlag3{{1, 1, 1}, {0, 1, 1}, {0, 0, 1}};
const Matrix kClean3{{1, 1, 0}, {0, 1, 1}, {1, 0, 1}};
const Matrix kMixedMT{{1, 1, 1}, {0, 1, 0}, {0, 0, 1}};
const Matrix kMixedCT{{1, 1, 0}, {0, 1, 1}, {0, 0, 1}};

std::vector<Deformation> expansion_configs() {
    std::vector<Deformation> out;
    for (const auto& A : {kTransversal2, kFlag2, kCusp, kChain, kTransversal3, kFlag3, kClean3, kMixedMT, kMixedCT})
        out.push_back(Deformation::make(A));
    out.push_back(Deformation::make(kFlag2, {2, 1}));
    return out;
}

BlockPoly random_poly(std::mt19937_64& rng, const Deformation& d, int max_exp) {
    std::uniform_int_distribution<int> nterms(1, 6), ex(0, max_exp), coef(-5, 5);
    BlockPoly f;
    const int n = nterms(rng);
    for (int t = 0; t < n; ++t) {
        MultiIndex a;
        for (int k = 1; k <= d.m; ++k)
            for (int i = 1; i <= d.block_dims[static_cast<size_t>(k - 1)]; ++i)
                if (int e = ex(rng); e > 0) a[{k, i}] = e;
        const int c = coef(rng);
        f = f + BlockPoly::monomial(a, Q(c == 0 ? 1 : c, 3));
    }
    return f;
}

IndexVec random_N(std::mt19937_64& rng, int ell, int max_n) {
    std::uniform_int_distribution<int> U(0, max_n);
    IndexVec N(static_cast<size_t>(ell));
    for (auto& n : N) n = U(rng);
    return N;
}

// --- criteria ---

void pipeline_exactness(Outcome& out) { run_group(out, "pipeline"); }

void restriction_verdicts(Outcome& out) { run_group(out, "restriction"); }

void level_functions(Outcome& out) { run_group(out, "levels"); }

void multicone_systems(Outcome& out) { run_group(out, "multicone"); }

void asymptotics(Outcome& out) {
    run_group(out, "asymptotics");
    std::mt19937_64 rng(20240611);

    // index-set truncation against the weight-filter oracle, 50 instances per configuration
    for (const auto& d : expansion_configs()) {
        const auto subsets = nonempty_subsets(d.ell);
        std::uniform_int_distribution<size_t> pick(0, subsets.size() - 1);
        for (int t = 0; t < 50; ++t) {
            const BlockPoly f = random_poly(rng, d, 3);
            const auto& J = subsets[pick(rng)];
            const IndexVec N = random_N(rng, d.ell, 12);
            out.require(truncation(d, J, N, family_from_function(f, d)) == taylor_oracle(d, J, N, f),
                        "truncation routes differ on " + matrix_str(d.A) + " for " + f.str());
        }
    }

    // derivative identity: d/dz App^{<N+shift}(F) = App^{<N}(F') with F' the shifted family
    int identities = 0;
    for (const auto& d : expansion_configs())
        for (int t = 0; t < 3; ++t) {
            const BlockPoly f = random_poly(rng, d, 3);
            const IndexVec N = random_N(rng, d.ell, 6);
            const int k = std::uniform_int_distribution<int>(1, d.m)(rng);
            const Coord c{k, std::uniform_int_distribution<int>(1, d.block_dims[static_cast<size_t>(k - 1)])(rng)};
            const auto F = family_from_function(f, d);
            out.require(app(d, derivative_shift(d, N, k), F).derivative(c) == app(d, N, shift_family(F, d, c)),
                        "derivative identity fails on " + matrix_str(d.A) + " for " + f.str());
            ++identities;
        }
    out.require(identities >= 20, "fewer than 20 derivative identities");

    // two blocks, invertible A: exponents (a22 n1 - a12 n2, a11 n2 - a21 n1) / det before the 1/sigma power
    std::uniform_int_distribution<int> entry(0, 6);
    int tried = 0;
    while (tried < 40) {
        Matrix A(2, Vec(2));
        for (auto& row : A)
            for (auto& x : row) x = Q(entry(rng), 1 + entry(rng) % 2);
        const Q det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
        bool zero_line = false;
        for (int i = 0; i < 2; ++i)
            zero_line = zero_line || (A[i][0] == 0 && A[i][1] == 0) || (A[0][i] == 0 && A[1][i] == 0);
        if (det == 0 || zero_line) continue;
        ++tried;
        const auto forms = remainder_linear_forms(build_levels(normal_model(A)), 2);
        out.require(forms.at(1) == Vec{A[1][1] / det, -A[0][1] / det} && forms.at(2) == Vec{-A[1][0] / det, A[0][0] / det},
                    "two-block exponent formula fails on " + matrix_str(A));
    }
}

void induced_maps(Outcome& out) { run_group(out, "maps"); }

void property_suites(Outcome& out) {
    constexpr int kSamples = 10000;
    EpsValues eps;
    eps.eps = eps.eps0 = 0.1;

    // contraction stability of the multicone systems
    const std::vector<std::pair<Matrix, std::set<int>>> systems{
        {kTransversal3, {}}, {kFlag2, {}}, {kCusp, {}}, {kClean3, {}}, {{{1, 0, 1}, {0, 1, 1}}, {1, 2}}, {kChain, {1}},
    };
    for (const auto& [A, zeros] : systems) {
        PointPattern p;
        p.zero_blocks = zeros;
        const Model md = Model::make(Deformation::make(A), p);
        const auto rep = contraction_stable_check(build_multicone(md, run_pipeline(md)), eps, kSamples, 42);
        out.require(rep.samples == kSamples && rep.failed == 0,
                    "contraction stability: " + std::to_string(rep.failed) + " failures on " + matrix_str(A));
    }

    // G members restricted to the level set stay below the bound of an F^q-bounded region,
    // and tau_k = phi_k(rho) on the basis columns
    const std::vector<Matrix> level_configs{
        {{1, 0, 1}, {0, 1, 1}, {0, 0, 1}}, {{1, 0, 1}, {0, 1, 1}, {0, 0, 1}, {1, 1, 1}},
        {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {0, 1, 1}}, {{1, 0, 0}, {0, 1, 0}, {1, 1, 1}, {1, 1, 0}, {0, 1, 1}},
        kChain, kCusp,
    };
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 1);
    constexpr double kBound = 2.0;
    for (const auto& A : level_configs) {
        const Model md = Model::make(Deformation::make(A), PointPattern{});
        const PipelineResult pr = run_pipeline(md);
        const LevelFamily fam = build_levels(md, pr);
        std::vector<LevelExpr> restricted;
        for (const auto& g : pr.G) restricted.push_back(restrict_to_levels(g.f, fam));
        int accepted = 0, violations = 0, attempts = 0, round_trip = 0;
        while (accepted < kSamples && attempts < 200 * kSamples) {
            ++attempts;
            std::vector<double> t;
            for (int k = 0; k < md.d.m; ++k) t.push_back(std::pow(10.0, -8 * u(rng) + 0.3));
            bool inside = true;
            for (const auto& p : pr.Fq)
                inside = inside && p.f.evaluate([&](const VarId& v) { return t[size_t(v.index - 1)]; }) <= kBound;
            if (!inside) continue;
            ++accepted;
            for (const auto& e : restricted)
                if (evaluate_level(e, t) > kBound * (1 + 1e-9)) ++violations;
            std::vector<double> rho;
            for (int j = 1; j <= fam.ell; ++j) rho.push_back(evaluate_level(fam.rho(j), t));
            for (int k : md.r.basis_cols) {
                const double phi =
                    md.dm.phi.at(k).evaluate([&](const VarId& v) { return rho[size_t(v.index - 1)]; });
                if (std::abs(phi - t[size_t(k - 1)]) > 1e-10 * t[size_t(k - 1)]) ++round_trip;
            }
        }
        out.require(accepted == kSamples, "boundedness: only " + std::to_string(accepted) + " samples on " + matrix_str(A));
        out.require(violations == 0, "boundedness: " + std::to_string(violations) + " violations on " + matrix_str(A));
        out.require(round_trip == 0, "round trip: " + std::to_string(round_trip) + " misses on " + matrix_str(A));
    }

    // estimates on the cusp and the flag for z1*z2 and the degree-8 exponential, N up to (3, 3)
    for (const auto& A : {kCusp, kFlag2}) {
        const Model md = normal_model(A);
        for (const auto& f : {BlockPoly::parse("z1*z2"), exp_truncation({1, 1}, 8)})
            for (long long n1 = 0; n1 <= 3; ++n1)
                for (long long n2 = 0; n2 <= 3; ++n2) {
                    const auto r = verify_estimate(md, f, {n1, n2}, 0.1, 400, 17);
                    std::ostringstream os;
                    os << "estimate fails on " << matrix_str(A) << " N = (" << n1 << ", " << n2 << "), ratio "
                       << r.max_violation;
                    out.require(r.pass, os.str());
                }
    }
}

void radical_property(Outcome& out) {
    std::set<std::string> seen;
    int configs = 0;
    for (const auto& c : corpus()) {
        if (c.group == "maps" || c.command == "classify2" || c.command == "map-check") continue;
        Scenario sc;
        try {
            sc = scenario_from_json(c.scenario);
        } catch (const InputError&) {
            continue;
        }
        const std::string key = matrix_str(sc.d.A) + to_json(sc.p).dump();
        if (!seen.insert(key).second) continue;
        const Model md = Model::make(sc.d, sc.p);
        if (is_fixed_point(sc.d, sc.p)) continue;
        ++configs;
        const GenSet Fq = run_pipeline(md).Fq;
        const GenSet gens = calG_generators(md);
        for (const auto& g : gens) {
            const auto r = radical_member(g, Fq, 64);
            out.require(r.verdict == Verdict::Yes && r.N <= 64,
                        g.str() + " has no power in [Fq] on " + matrix_str(sc.d.A));
        }
        out.require(equivalent(Fq, gens) == Verdict::Yes, "[Fq] and G differ on " + matrix_str(sc.d.A));
    }
    out.require(configs >= 20, "only " + std::to_string(configs) + " configurations");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"semigroup pipeline exactness", pipeline_exactness},
        {"restriction verdicts and witnesses", restriction_verdicts},
        {"level functions and strictness", level_functions},
        {"multicone systems and closure", multicone_systems},
        {"asymptotic index sets, remainders and oracles", asymptotics},
        {"induced maps", induced_maps},
        {"property suites", property_suites},
        {"radical property of the generator sets", radical_property},
    };
    int failed = 0, n = 0;
    for (const auto& [name, fn] : criteria) {
        ++n;
        Outcome out;
        const auto start = std::chrono::steady_clock::now();
        try {
            fn(out);
        } catch (const std::exception& e) {
            out.ok = false;
            out.notes.push_back(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %d %s (%.2f s)\n", out.ok ? "PASS" : "FAIL", n, name.c_str(), secs);
        for (const auto& note : out.notes) std::printf("     %s\n", note.c_str());
        if (!out.ok) ++failed;
    }
    return failed ? 1 : 0;
}
