#pragma once

#include "mspec/deformation.hpp"
#include "mspec/semigroup.hpp"

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace mspec {

// Nested max/min/product/power of monomials.  Build through the factory functions,
// which keep the normal form: no singleton max/min, flat products, merged duplicates.
class LevelExpr {
public:
    enum class Kind { Mono, Max, Min, Prod, Pow };

    LevelExpr() : LevelExpr(Monomial{}) {}
    explicit LevelExpr(Monomial m) : kind_(Kind::Mono), mono_(std::move(m)) { rekey(); }

    static LevelExpr one() { return LevelExpr(); }
    static LevelExpr max_of(std::vector<LevelExpr> xs);
    static LevelExpr min_of(std::vector<LevelExpr> xs);
    static LevelExpr prod(std::vector<LevelExpr> xs);
    static LevelExpr pow(const LevelExpr& base, const Q& r);

    Kind kind() const { return kind_; }
    const Monomial& mono() const { return mono_; }
    const std::vector<LevelExpr>& children() const { return kids_; }
    const Q& power() const { return power_; }

    bool is_one() const { return kind_ == Kind::Mono && mono_.is_one(); }
    bool has_kind(VarKind k) const;
    // canonical serialization, used for equality and ordering
    const std::string& key() const { return key_; }

    bool operator==(const LevelExpr& o) const { return key_ == o.key_; }
    bool operator<(const LevelExpr& o) const { return key_ < o.key_; }

    // "t1 / max(t1, t2)"
    std::string str(const VarNamer& namer = default_var_name) const;
    std::string latex(const VarNamer& namer = default_var_name) const;

private:
    LevelExpr(Kind k, std::vector<LevelExpr> kids, Q power = 1);
    static LevelExpr extremum(Kind k, std::vector<LevelExpr> xs);
    void rekey();

    Kind kind_ = Kind::Mono;
    Monomial mono_;
    std::vector<LevelExpr> kids_;
    Q power_ = 1;
    std::string key_;
};

nlohmann::json to_json(const LevelExpr& e);
LevelExpr level_from_json(const nlohmann::json& j);

// Replaces lambda_j by values.at(j) wherever j is a key.
LevelExpr substitute(const LevelExpr& e, const std::map<int, LevelExpr>& values);

// lambda_j * f^(1/|a|) with a = nu_j^lambda(f) < 0
LevelExpr sol_lambda(const Monomial& f, int j);

struct LevelFamily {
    int ell = 0;
    std::vector<LevelExpr> rho_Lambda;              // index j - 1, functions of tau' only
    std::map<int, LevelExpr> rho_stages;            // other rows, before restriction
    std::map<int, GenSet> lower_sets;               // F_< feeding each stage
    std::vector<bool> strict;                       // index j - 1
    std::vector<std::vector<int>> permutations;     // generalized family: distinct orders used

    const LevelExpr& rho(int j) const { return rho_Lambda.at(j - 1); }
};

// Throws InputError when the point vanishes on a basis column (a fixed point).
LevelFamily build_levels(const Model& md, const PipelineResult& pr);
LevelFamily build_levels(const Model& md);

// exponent of t after tau_k -> t^{s_k} tau_k, for t -> 0+
Q effective_exponent(const LevelExpr& e, const std::map<int, Q>& scaling);
// largest |exponent| of tau_k that a single-coordinate scaling can produce
Q exponent_bound(const LevelExpr& e, int k);

bool is_strict(const LevelFamily& fam, const Deformation& d, int j);

// Min over all action orders whose leading L rows are independent.
// Throws InputError if more than max_perms such orders exist.
LevelFamily build_generalized_levels(const Deformation& d, const PointPattern& p, size_t max_perms = 40320);

// tau[k-1] is tau_k; lambda values are used only if the expression still has lambdas.
double evaluate_level(const LevelExpr& e, const std::vector<double>& tau, const std::vector<double>& lambda = {});

// f restricted to the level set: lambda_j -> rho_{Lambda,j}
LevelExpr restrict_to_levels(const Monomial& f, const LevelFamily& fam);

nlohmann::json to_json(const LevelFamily& fam);

// Reads the str() syntax back: "t1 / max(t1, t2)", "1/max(1, t2/(t1*t3))", "t3^(1/2)".
LevelExpr parse_level(const std::string& text);

// Pushes positive monomial factors into the adjacent max/min, so c*max(a, b) and max(c*a, c*b)
// share one form.  Used to compare expressions written in different but equal shapes.
LevelExpr absorb_factors(const LevelExpr& e);

}  // namespace mspec
