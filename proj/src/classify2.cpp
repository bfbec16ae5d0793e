#include "mspec/asymptotics.hpp"

#include <algorithm>
#include <numeric>

namespace mspec {

namespace {

struct Match {
    std::string label;
    std::map<std::string, Q> params;
};

// B is normalized: B[0][0] = B[1][1] = 1 and 1 - b*c > 0
std::optional<Match> match_catalog(const Matrix& B) {
    const Q& b = B[0][1];
    const Q& c = B[1][0];
    if (B[0].size() == 2) {
        if (b == 0 && c == 0) return Match{"m=2 N=2", {}};
        if (b > 0 && c == 0) return Match{"m=2 N=3", {{"b", b}}};
        if (b > 0 && c > 0) return Match{"m=2 N=4", {{"b", b}, {"c", c}}};
        return std::nullopt;
    }
    const Q& e = B[0][2];
    const Q& y = B[1][2];
    if (b == 0 && c == 0 && e > 0 && y == 0 && e != 1) return Match{"m=3 N=3", {{"e", e}}};
    if (b > 0 && c == 0) {
        if (e > 0 && y == 0 && e != 1) return Match{"m=3 N=4 (a)", {{"b", b}, {"e", e}}};
        if (e == 0 && y > 0) return Match{"m=3 N=4 (b)", {{"b", b}, {"e", y}}};
        if (e > 0 && y > 0 && b * y != e) return Match{"m=3 N=5", {{"b", b}, {"e", e}, {"f", y}}};
    }
    if (b > 0 && c > 0 && e > 0 && y > 0 && b * c != 1 && b * y != e && c * e != y)
        return Match{"m=3 N=6", {{"b", b}, {"c", c}, {"e", e}, {"r", y}}};
    return std::nullopt;
}

}  // namespace

TwoManifoldCase classify_two_manifolds(const Matrix& A) {
    if (A.size() != 2) throw InputError("the catalog covers two submanifolds", "classify2");
    TwoManifoldCase out;
    out.m = static_cast<int>(A[0].size());
    if (out.m < 1 || out.m > 3) throw InputError("the catalog covers m <= 3 blocks", "classify2");
    for (const auto& row : A)
        for (const Q& a : row) out.nonzero += a != 0;

    const Deformation d = Deformation::make(A);
    bool zero_column = false;
    for (int k = 1; k <= out.m; ++k)
        if (d.a(1, k) == 0 && d.a(2, k) == 0) zero_column = true;
    if (out.m == 1 || classify_action(d) == ActionType::Degenerate) {
        out.message = "the action is degenerate";
        return out;
    }
    if (zero_column) {
        out.message = "a block is fixed by both actions: drop it and use fewer blocks";
        return out;
    }

    std::vector<int> order(static_cast<size_t>(out.m));
    std::iota(order.begin(), order.end(), 1);
    do {
        for (bool swap : {false, true}) {
            Matrix B(2, Vec(static_cast<size_t>(out.m)));
            for (int r = 0; r < 2; ++r)
                for (int k = 0; k < out.m; ++k)
                    B[static_cast<size_t>(r)][static_cast<size_t>(k)] =
                        A[static_cast<size_t>(swap ? 1 - r : r)][static_cast<size_t>(order[static_cast<size_t>(k)] - 1)];
            if (B[0][0] == 0 || B[1][1] == 0) continue;
            for (int r = 0; r < 2; ++r) {
                const Q s = B[static_cast<size_t>(r)][static_cast<size_t>(r)];
                for (auto& x : B[static_cast<size_t>(r)]) x /= s;
            }
            if (1 - B[0][1] * B[1][0] <= 0) continue;
            auto hit = match_catalog(B);
            if (!hit) continue;
            out.in_catalog = true;
            out.label = hit->label;
            out.parameters = hit->params;
            out.block_order = order;
            out.rows_swapped = swap;
            out.catalog_matrix = B;
            break;
        }
        if (out.in_catalog) break;
    } while (std::next_permutation(order.begin(), order.end()));

    if (!out.in_catalog) {
        out.message = "two blocks carry the same weights or a catalog inequality fails: this reduces to m = 2";
        return out;
    }

    // the catalog multicones take xi^(3) = 0 in the third block
    const Deformation dc = Deformation::make(out.catalog_matrix);
    PointPattern p;
    p.normalized = true;
    if (out.m == 3) p.zero_blocks = {3};
    const Model md = Model::make(dc, p);
    const PipelineResult pr = run_pipeline(md);
    out.system = system_str(build_multicone(md, pr));
    for (const auto& J : nonempty_subsets(2)) {
        std::string c = "T_" + set_str(J) + ": ";
        const auto parts = index_constraints(dc, J);
        for (size_t i = 0; i < parts.size(); ++i) c += (i ? ", " : "") + parts[i];
        out.constraints.push_back(c);
    }
    out.remainder = remainder_symbolic(build_levels(md, pr), dc);
    return out;
}

nlohmann::json to_json(const TwoManifoldCase& c) {
    nlohmann::json j;
    j["in_catalog"] = c.in_catalog;
    j["m"] = c.m;
    j["nonzero"] = c.nonzero;
    if (!c.in_catalog) {
        j["message"] = c.message;
        return j;
    }
    j["label"] = c.label;
    j["block_order"] = c.block_order;
    j["rows_swapped"] = c.rows_swapped;
    j["catalog_matrix"] = matrix_str(c.catalog_matrix);
    nlohmann::json params;
    for (const auto& [k, v] : c.parameters) params[k] = q_str(v);
    j["parameters"] = params;
    j["system"] = c.system;
    j["constraints"] = c.constraints;
    j["remainder"] = c.remainder;
    return j;
}

}  // namespace mspec
