#pragma once

#include "mspec/deformation.hpp"
#include "mspec/monomial.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace mspec {

// generator value n_k for psi_k (Zero on vanishing blocks)
Value psi_value(const Model& md, int k);

GenSet build_G(const Model& md);
GenSet build_G_hat(const Model& md);

GenSet apply_Lk(const GenSet& F, int k);
GenSet apply_Lj_lambda(const GenSet& F, int j);
GenSet apply_Lk_modified(const GenSet& F, int k);
GenSet apply_Lj_lambda_modified(const GenSet& F, int j);

struct PipelineResult {
    GenSet G;
    std::vector<std::pair<int, GenSet>> F0_stages;  // after eliminating lambda_r
    std::vector<std::pair<int, GenSet>> F_stages;   // after L_{k_s}
    GenSet F0;
    GenSet Fq;
    int q = 0;
    std::vector<int> zero_cols_L;
};

PipelineResult run_pipeline(const Model& md);

enum class Verdict { Yes, No, Unknown };
std::string to_string(Verdict v);

struct Membership {
    Verdict verdict = Verdict::No;
    std::vector<long long> witness;  // exponent per generator, in set order
};

// f as a non-negative integer combination of the monomials of H (values ignored)
Membership mono_membership(const Monomial& f, const GenSet& H, int bound = 200);
// (f, v) in [H] including the value component
Membership pair_membership(const GenPair& p, const GenSet& H, int bound = 200);

struct RadicalResult {
    Verdict verdict = Verdict::No;
    int N = 0;
    std::vector<long long> witness;
};

RadicalResult radical_member(const GenPair& p, const GenSet& H, int max_N = 64, int bound = 200);
Verdict equivalent(const GenSet& A, const GenSet& B, int max_N = 64, int bound = 200);

// Unique exponents of f over (phi_inv, psi, lambda) when f is the monomial of an element of [G].
struct Representation {
    std::map<int, Q> phi_exp;     // j in R
    std::map<int, Q> psi_exp;     // k not in C
    std::map<int, Q> lambda_exp;  // j not in R
};
std::optional<Representation> represent(const Monomial& f, const Model& md);

// The value making (f, v) a member of the G-semigroup; nullopt when f is not representable.
std::optional<Value> value_of(const Monomial& f, const Model& md);
std::optional<Value> value_of(const Monomial& f, const PipelineResult& pr, const Model& md);
bool in_calG(const GenPair& p, const Model& md);

// Rational-cone generators of the G-semigroup, each raised to an integral power, with values.
GenSet calG_generators(const Model& md);
// lambda-free generators of the hat-semigroup (lambda eliminated from the hat set)
GenSet ghat_generators(const Model& md);
Membership ghat_membership(const GenPair& p, const Model& md, int bound = 200);

}  // namespace mspec
