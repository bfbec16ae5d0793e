#pragma once

#include "mspec/deformation.hpp"
#include "mspec/semigroup.hpp"

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace mspec {

// One factor (v + eps_slot)^power of an inequality bound; the lower bound uses v - eps_slot.
struct BoundFactor {
    Value v = Value::zero();
    int slot = 0;  // 0: the shared eps; i >= 1: per-pair eps of generator i
    Q power = 1;
};

struct MulticoneInequality {
    Monomial f;
    Value v = Value::zero();
    bool two_sided = false;  // lower bound present
    std::vector<BoundFactor> bound;
};

enum class EpsMode { Single, PerPair };

// Block cone factor: a proper cone of the given half-aperture around the point's direction,
// or the whole block when the point vanishes there.
struct ConeFactor {
    bool full_space = false;
    double half_aperture = 0.5;  // radians
};

struct MulticoneSystem {
    int m = 0;
    GenSet H;
    EpsMode eps_mode = EpsMode::Single;
    bool one_sided = false;
    bool has_x0 = true;
    std::map<int, ConeFactor> cones;  // blocks still present
    std::set<int> removed;            // blocks projected away
    std::vector<MulticoneInequality> inequalities;
    PointPattern point;
    Matrix actions;  // rows of the deformation matrix, acting on all m blocks
};

struct EpsValues {
    double eps = 0.1;
    double eps0 = 0.1;
    std::map<int, std::pair<double, double>> per_slot;  // slot -> (minus, plus)

    double minus(int slot) const;
    double plus(int slot) const;
};

struct BlockPoint {
    std::vector<double> norms;  // |z^(k)|, index k - 1
    std::vector<bool> in_cone;  // angle check result per block (empty: all true)
    double x0 = 0;
};

// Q(H) = H: every nonzero-valued pair has its inverse in H
bool q_closed(const GenSet& H);

// Inequalities over F^q.  Throws InputError if [F^q] is not equivalent to the G-semigroup.
MulticoneSystem build_multicone(const Model& md, const PipelineResult& pr, EpsMode mode = EpsMode::Single,
                                bool check_equivalence = true);
// The f < v + eps form; needs q_closed(H).
MulticoneSystem to_one_sided(const MulticoneSystem& s);

double bound_value(const std::vector<BoundFactor>& bound, const PointPattern& p, const EpsValues& eps, bool upper);
bool member(const MulticoneSystem& s, const BlockPoint& z, const EpsValues& eps);

std::string inequality_str(const MulticoneInequality& q, const VarNamer& namer = default_var_name);
std::string system_str(const MulticoneSystem& s);
nlohmann::json to_json(const MulticoneSystem& s);

struct ClosureElement {
    GenPair pair;
    std::map<int, Q> factors;  // index into F^q (set order) -> natural exponent
};

struct ClosedInequality {
    Monomial numerator;    // f_n
    Monomial denominator;  // f_d
    Value v = Value::zero();
    std::vector<BoundFactor> bound;
};

struct ClosureSystem {
    GenSet Fq;
    std::vector<ClosureElement> K;
    std::vector<ClosedInequality> inequalities;
    bool cap_hit = false;
    PointPattern point;
};

// star-closure of F^q, skipping products already implied by two elements of K.  Throws when
// more than cap elements are generated.
ClosureSystem closure(const Model& md, const PipelineResult& pr, size_t cap = 10000);
bool member_closed(const ClosureSystem& c, const BlockPoint& z, const EpsValues& eps);
std::string closed_inequality_str(const ClosedInequality& q);

// Drops block k.  k_zero: the block ranges over [0, inf) (vanishing block).
MulticoneSystem project(const MulticoneSystem& s, int k, bool k_zero);

struct ContractionReport {
    int samples = 0;
    int passed = 0;
    int failed = 0;
    int rejected = 0;  // sampling attempts outside the system
};

// log-uniform sampling through the action: tau_k = phi_k(lambda) * c_k with lambda_j in [10^-depth, 1],
// rejected against the system
std::optional<BlockPoint> sample_member(const MulticoneSystem& s, const EpsValues& eps, std::mt19937_64& rng,
                                        int attempts = 2000, double depth = 8.0);
BlockPoint act(const MulticoneSystem& s, const BlockPoint& z, const std::vector<double>& lambda);
ContractionReport contraction_stable_check(const MulticoneSystem& s, const EpsValues& eps, int samples,
                                           std::uint64_t seed);

// Point sets for the normal-cone oracle: polynomial constraints over real block coordinates x1..xm.
class Polynomial {
public:
    std::map<std::vector<int>, double> terms;  // exponent vector (length m) -> coefficient
    int m = 0;

    static Polynomial parse(const std::string& text, int m);
    double eval(const std::vector<double>& x) const;
    int degree_in(int var) const;
    bool linear_in(int var) const;
    // a(x) * x_var + b(x) split
    std::pair<Polynomial, Polynomial> split_linear(int var) const;
};

struct PointSet {
    bool empty = false;
    int m = 0;
    std::vector<Polynomial> equalities;                       // p = 0
    std::vector<std::pair<Polynomial, bool>> inequalities;    // p > 0 (strict) or p >= 0
    std::vector<int> solved;                                  // variable solved from each equality

    static PointSet parse(const std::string& text, int m);
    bool contains(const std::vector<double>& x, double tol = 1e-9) const;
    std::optional<std::vector<double>> sample(std::mt19937_64& rng, double radius) const;
};

enum class ProbeVerdict { InCone, NotInCone, Inconclusive };
std::string to_string(ProbeVerdict v);

struct ProbeResult {
    ProbeVerdict verdict = ProbeVerdict::Inconclusive;
    double eps = 0;
    double radius = 0;
    int hits = 0;
    int z_samples = 0;
};

// Block directions: sign of xi^(k) for the real coordinate model (+1 when unspecified).
BlockPoint to_block_point(const std::vector<double>& x, const MulticoneSystem& s, const std::vector<int>& direction);

ProbeResult normal_cone_probe(const Model& md, const PointSet& Z, const std::vector<int>& direction,
                              const std::vector<double>& eps_schedule, const std::vector<double>& ball_schedule,
                              int samples = 20000, std::uint64_t seed = 1);

}  // namespace mspec
