#pragma once

#include "mspec/deformation.hpp"
#include "mspec/levels.hpp"
#include "mspec/multicone.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace mspec {

// (block k, coordinate i inside the block), both 1-based
using Coord = std::pair<int, int>;
// exponent per coordinate; zero entries are never stored
using MultiIndex = std::map<Coord, int>;
using IndexVec = std::vector<long long>;  // N = (n_1..n_ell)

std::string coord_name(const Coord& c, const std::string& prefix = "z");
std::string multi_index_str(const MultiIndex& a);
int block_length(const MultiIndex& a, int k);
Q factorial(const MultiIndex& a);  // alpha!
MultiIndex add(const MultiIndex& a, const MultiIndex& b);

// Polynomial in block coordinates with exact rational coefficients.
class BlockPoly {
public:
    std::map<MultiIndex, Q> terms;

    static BlockPoly constant(const Q& c);
    static BlockPoly monomial(const MultiIndex& a, const Q& c = 1);
    // "z1*z2", "3/2*z1^2 - z2_2", "(z1 + z2)^3".  Variables z<k> or z<k>_<i> (x accepted too).
    static BlockPoly parse(const std::string& text);

    bool is_zero() const { return terms.empty(); }
    BlockPoly operator+(const BlockPoly& o) const;
    BlockPoly operator-(const BlockPoly& o) const;
    BlockPoly operator*(const BlockPoly& o) const;
    BlockPoly scaled(const Q& c) const;
    bool operator==(const BlockPoly& o) const { return terms == o.terms; }

    BlockPoly derivative(const Coord& c) const;
    BlockPoly derivative(const MultiIndex& a) const;
    // sets every coordinate of the given blocks to 0
    BlockPoly restrict_zero(const std::set<int>& blocks) const;
    std::set<int> blocks() const;
    int max_exponent(const Coord& c) const;
    std::set<Coord> coords() const;

    double eval(const std::map<Coord, double>& z) const;
    std::string str(const std::string& prefix = "z") const;
};

nlohmann::json to_json(const BlockPoly& p);

// sum of z^a / a! over every coordinate of d with |a| <= degree
BlockPoly exp_truncation(const std::vector<int>& block_dims, int degree);

std::set<int> blocks_of(const Deformation& d, const std::set<int>& J);  // K_J
// all nonempty subsets of {1..ell}; throws InputError for ell > 8
std::vector<std::set<int>> nonempty_subsets(int ell);
std::string set_str(const std::set<int>& J);

struct IndexSet {
    std::set<int> J;
    IndexVec N;
    std::set<int> K;
    std::vector<MultiIndex> members;
};

// alpha supported on K_J with sum_k a_jk |alpha^(k)| < n_j / sigma_A for every j in J
IndexSet index_set(const Deformation& d, const std::set<int>& J, const IndexVec& N);
// the same constraints written out, e.g. "3|a1| + 2|a2| < n1"
std::vector<std::string> index_constraints(const Deformation& d, const std::set<int>& J);

struct CoefficientFamily {
    std::map<std::set<int>, std::map<MultiIndex, BlockPoly>> coeffs;
    bool zero_default = false;  // absent entries are 0 instead of missing

    std::optional<BlockPoly> get(const std::set<int>& J, const MultiIndex& a) const;
};

// f_{J,alpha} = d^alpha f restricted to Z_J, for every J and every alpha up to the degree of f
CoefficientFamily family_from_function(const BlockPoly& f, const Deformation& d);
CoefficientFamily zero_family();

struct TemplateTerm {
    std::set<int> J;
    int sign = 1;
    MultiIndex alpha;
};

struct AppTemplate {
    IndexVec N;
    std::vector<TemplateTerm> terms;
    std::string str() const;
};

AppTemplate app_template(const Deformation& d, const IndexVec& N);
// Throws InputError naming the first missing coefficient.
BlockPoly app_polynomial(const AppTemplate& t, const CoefficientFamily& F);
BlockPoly app(const Deformation& d, const IndexVec& N, const CoefficientFamily& F);

// T_J^{<N}(F) by the index-set route
BlockPoly truncation(const Deformation& d, const std::set<int>& J, const IndexVec& N, const CoefficientFamily& F);
// T_J^{<N}(f_J) by the lambda-derivative route: monomials of f with integer weight
// sigma_A sum_k a_jk |alpha^(k)| below n_j for every j in J
BlockPoly taylor_oracle(const Deformation& d, const std::set<int>& J, const IndexVec& N, const BlockPoly& f);

LevelExpr remainder_exponent(const LevelFamily& fam, const Deformation& d, const IndexVec& N);
// exponent of tau_k as a linear form in n_1..n_ell, before the 1/sigma_A power; needs monomial levels
std::map<int, Vec> remainder_linear_forms(const LevelFamily& fam, int m);
std::string remainder_symbolic(const LevelFamily& fam, const Deformation& d);

IndexVec derivative_shift(const Deformation& d, const IndexVec& N, int k);
// F' of the derivative identity for the coordinate c
CoefficientFamily shift_family(const CoefficientFamily& F, const Deformation& d, const Coord& c);

struct ConsistencyReport {
    bool ok = true;
    std::vector<std::pair<std::set<int>, std::set<int>>> checked;
    std::vector<std::pair<std::set<int>, std::set<int>>> failed;
};
// F_J = F_J' whenever K_J = K_J'
ConsistencyReport consistency_C1(const CoefficientFamily& F, const Deformation& d);

// non-identity actions induced on Z_J, duplicates removed (first index kept)
std::vector<int> induced_actions(const Deformation& d, const std::set<int>& J);

struct PolyMapSpec {
    Deformation source;
    Deformation target;
    std::map<Coord, BlockPoly> components;  // target coordinate -> polynomial in source coordinates
};

struct MapCheck {
    bool ok = false;
    std::string reason;
    std::map<Coord, BlockPoly> induced;  // T f: monomials of weight exactly the target column
};

MapCheck check_map(const PolyMapSpec& spec);

struct EstimateReport {
    double C_fit = 0;     // max |f - App| / remainder at eps
    double C_half = 0;    // same at eps / 2
    double M_fit = 0;     // max of the term-wise majorant sum |c z^a| / remainder at eps
    double M_pushed = 0;  // same after pushing every sample by 10^-3 along each action
    double max_violation = 0;  // larger of C_half / C_fit and M_pushed / M_fit
    bool exact = false;        // f - App vanishes identically
    bool pass = false;
    int samples = 0;
};

EstimateReport verify_estimate(const Model& md, const BlockPoly& f, const CoefficientFamily& F, const IndexVec& N,
                               double eps = 0.1, int samples = 400, std::uint64_t seed = 1);
EstimateReport verify_estimate(const Model& md, const BlockPoly& f, const IndexVec& N, double eps = 0.1,
                               int samples = 400, std::uint64_t seed = 1);

// verify_estimate against the zero family for every N in [0, degree]^ell
bool flatness_check(const Model& md, const BlockPoly& f, int degree, double eps = 0.1, int samples = 200,
                    std::uint64_t seed = 1);

struct TwoManifoldCase {
    bool in_catalog = false;
    std::string label;       // "m=3 N=4 (b)"
    std::string message;     // for matrices outside the catalog
    int m = 0;
    int nonzero = 0;
    std::vector<int> block_order;  // catalog block i is input block block_order[i-1]
    bool rows_swapped = false;
    Matrix catalog_matrix;
    std::map<std::string, Q> parameters;  // b, c, e, f, r
    std::string system;
    std::vector<std::string> constraints;
    std::string remainder;
};

TwoManifoldCase classify_two_manifolds(const Matrix& A);
nlohmann::json to_json(const TwoManifoldCase& c);

}  // namespace mspec
