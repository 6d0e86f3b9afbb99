#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "kwalk/errors.hpp"
#include "kwalk/exact.hpp"

namespace kwalk {

/// One evaluated closed-form bound with every intermediate quantity exposed,
/// so downstream reports can echo exactly what the number was computed from.
/// Assumption checks are first-class: a violated assumption moves to
/// failed_assumptions instead of silently clamping or throwing.
struct BoundReport {
    std::string name;
    double value = 0.0;
    std::optional<double> upper;  // populated for two-sided bounds
    std::map<std::string, double> inputs;
    std::map<std::string, double> intermediates;
    std::vector<std::string> assumptions;
    std::vector<std::string> failed_assumptions;
    std::vector<std::string> notes;

    bool ok() const { return failed_assumptions.empty(); }

    nlohmann::json to_json() const {
        nlohmann::json j{{"name", name},
                         {"value", value},
                         {"inputs", inputs},
                         {"intermediates", intermediates},
                         {"assumptions", assumptions},
                         {"failed_assumptions", failed_assumptions},
                         {"notes", notes}};
        if (upper) j["upper"] = *upper;
        return j;
    }
};

/// Cover-time sandwich h_min * H_n <= C(G) <= h_max * H_n with exact H_n.
inline std::pair<double, double> matthews_bounds(double h_min, double h_max,
                                                 std::uint64_t n) {
    if (!(h_min > 0.0) || h_min > h_max)
        throw ArgError("matthews bounds need 0 < h_min <= h_max");
    if (n < 2) throw ArgError("matthews bounds need n >= 2");
    double hn = harmonic_number(n);
    return {h_min * hn, h_max * hn};
}

/// Finite form of the k-walk cover upper bound
///   e * r * h_max * (1 + 1/ln^2 n) + h_max * H_n / ln^2 n,
/// with r = ceil((ln n + 2 ln ln n) / k). Proven for k up to ln n; larger k
/// still evaluates but the regime violation is recorded.
inline BoundReport baby_matthews_upper(double h_max, std::uint64_t n, std::uint32_t k) {
    if (n < 3) throw ArgError("bound needs n >= 3 so that ln ln n > 0");
    if (k < 1) throw ArgError("bound needs k >= 1");
    if (!(h_max > 0.0)) throw ArgError("bound needs h_max > 0");
    BoundReport r;
    r.name = "baby_matthews_upper";
    r.inputs = {{"h_max", h_max}, {"n", static_cast<double>(n)}, {"k", static_cast<double>(k)}};
    double ln_n = std::log(static_cast<double>(n));
    double lnln_n = std::log(ln_n);
    double rounds = std::ceil((ln_n + 2.0 * lnln_n) / k);
    double hn = harmonic_number(n);
    double ln2 = ln_n * ln_n;
    r.value = std::exp(1.0) * rounds * h_max * (1.0 + 1.0 / ln2) + h_max * hn / ln2;
    r.intermediates = {{"r", rounds}, {"H_n", hn}, {"ln_n", ln_n}, {"lnln_n", lnln_n}};
    if (static_cast<double>(k) <= ln_n)
        r.assumptions.push_back("k <= ln n (proof regime)");
    else
        r.failed_assumptions.push_back("k <= ln n (proof regime); value extrapolated");
    return r;
}

/// Composition lower bound p_c * (1 - k (1 - p_h)^ell), clamped below at 0.
inline double compose_cover_prob(double p_c, double p_h, std::uint32_t k,
                                 std::uint32_t ell) {
    if (p_c < 0.0 || p_c > 1.0 || p_h < 0.0 || p_h > 1.0)
        throw ArgError("composition needs probabilities in [0, 1]");
    if (k < 1 || ell < 1) throw ArgError("composition needs k, ell >= 1");
    double interior = 1.0 - static_cast<double>(k) * std::pow(1.0 - p_h, static_cast<double>(ell));
    return std::max(0.0, p_c * interior);
}

/// k-walk cover upper bound (1+eps)/k * C + (3 ln k + 2 f_val) * h_max; eps
/// and f_val are the explicit finite stand-ins for (1+o(1)) and f(n).
inline BoundReport kspeed_upper(double cover, double h_max, std::uint32_t k,
                                double f_val, double eps = 0.1) {
    if (!(cover > 0.0) || !(h_max > 0.0)) throw ArgError("bound needs cover, h_max > 0");
    if (k < 1) throw ArgError("bound needs k >= 1");
    if (!(f_val > 0.0)) throw ArgError("bound needs f_val > 0");
    if (eps < 0.0) throw ArgError("bound needs eps >= 0");
    BoundReport r;
    r.name = "kspeed_upper";
    r.inputs = {{"cover", cover},
                {"h_max", h_max},
                {"k", static_cast<double>(k)},
                {"f_val", f_val},
                {"eps", eps}};
    double ln_k = std::log(static_cast<double>(k));
    r.value = (1.0 + eps) / k * cover + (3.0 * ln_k + 2.0 * f_val) * h_max;
    r.intermediates = {{"ln_k", ln_k}, {"g", cover / h_max}};
    r.assumptions = {"logs natural", "eps is the finite surrogate for the (1+o(1)) factor",
                     "f_val is the finite surrogate for a function growing without bound"};
    return r;
}

/// Default f_val choice: ln of the cover/hitting ratio g = C / h_max.
inline double default_f_val(double cover, double h_max) {
    if (!(cover > 0.0) || !(h_max > 0.0)) throw ArgError("f_val needs cover, h_max > 0");
    return std::log(cover / h_max);
}

/// Short-walk hit probability lower bound on a d-regular expander:
/// s = ln(2n)/ln(d/lambda), b = lambda/(d-lambda), value = s/(2n+4s+4bn),
/// valid for walks of length 2s.
inline BoundReport expander_hit_lower(std::uint64_t n, double d, double lambda) {
    if (n < 2) throw ArgError("bound needs n >= 2");
    if (!(lambda > 0.0) || lambda >= d)
        throw ArgError("bound needs 0 < lambda < d (spectral gap present)");
    BoundReport r;
    r.name = "expander_hit_lower";
    r.inputs = {{"n", static_cast<double>(n)}, {"d", d}, {"lambda", lambda}};
    double s = std::log(2.0 * static_cast<double>(n)) / std::log(d / lambda);
    double b = lambda / (d - lambda);
    double nn = static_cast<double>(n);
    r.value = s / (2.0 * nn + 4.0 * s + 4.0 * b * nn);
    r.intermediates = {{"s", s}, {"b", b}, {"walk_length", 2.0 * s}};
    r.assumptions = {"applies to walks of length 2s"};
    if (s < 1.0)
        r.notes.push_back("s < 1: spectral gap so wide the bound degenerates toward 0");
    return r;
}

/// Per-walk budget t = 16 (b+1) n ln n / k under which k independent short
/// walks miss coverage with probability at most 1/n^2. The derivation needs
/// t > 2s and n >= 2s; violations are recorded, not thrown.
inline BoundReport expander_walk_budget(std::uint64_t n, double d, double lambda,
                                        std::uint32_t k) {
    if (k < 1) throw ArgError("budget needs k >= 1");
    BoundReport r = expander_hit_lower(n, d, lambda);
    r.name = "expander_walk_budget";
    r.inputs["k"] = static_cast<double>(k);
    double s = r.intermediates["s"];
    double b = r.intermediates["b"];
    double nn = static_cast<double>(n);
    double t = 16.0 * (b + 1.0) * nn * std::log(nn) / k;
    r.value = t;
    r.intermediates["t"] = t;
    r.intermediates["failure_bound"] = 1.0 / (nn * nn);
    r.notes.clear();
    r.assumptions = {"failure probability bound is 1/n^2"};
    if (t > 2.0 * s)
        r.assumptions.push_back("t > 2s");
    else
        r.failed_assumptions.push_back("t > 2s violated: budget shorter than one hit window");
    if (nn >= 2.0 * s)
        r.assumptions.push_back("n >= 2s");
    else
        r.failed_assumptions.push_back("n >= 2s violated");
    return r;
}

/// Two-sided k-walk cover bounds on the n-cycle:
///   lower = n^2 / (16 ln(8k)),  upper = 2 n^2 / ln k (for 3 <= k <= e^{n/4}).
/// value carries the lower side, upper the upper side.
inline BoundReport cycle_bounds(std::uint64_t n, std::uint32_t k) {
    if (n < 3) throw ArgError("cycle bounds need n >= 3");
    if (k < 1) throw ArgError("cycle bounds need k >= 1");
    BoundReport r;
    r.name = "cycle_bounds";
    r.inputs = {{"n", static_cast<double>(n)}, {"k", static_cast<double>(k)}};
    double nn = static_cast<double>(n);
    double ln_8k = std::log(8.0 * static_cast<double>(k));
    r.value = nn * nn / (16.0 * ln_8k);
    r.intermediates = {{"ln_8k", ln_8k}};
    r.notes.push_back(
        "lower side is the contrapositive of 'cover within n^2/s forces k >= e^{s/16}/8', "
        "solved for the cover time as n^2/(16 ln(8k))");
    double ln_k = std::log(static_cast<double>(k));
    r.intermediates["ln_k"] = ln_k;
    bool upper_regime = k >= 3 && ln_k <= nn / 4.0;
    if (upper_regime) {
        r.upper = 2.0 * nn * nn / ln_k;
        r.assumptions.push_back("3 <= k <= e^{n/4} (upper-side regime)");
    } else {
        r.failed_assumptions.push_back("3 <= k <= e^{n/4} violated; upper side omitted");
    }
    return r;
}

/// d-dimensional torus cover lower bound by projecting onto one axis: the
/// projected walk lives on a cycle of length n^{1/d}, inheriting
/// (n^{1/d})^2 / (16 ln(8k)).
inline BoundReport grid_lower(std::uint64_t n, std::uint32_t d, std::uint32_t k) {
    if (d < 2) throw ArgError("grid lower bound needs d >= 2");
    if (k < 2) throw ArgError("grid lower bound needs k >= 2");
    auto side = static_cast<std::uint64_t>(
        std::llround(std::pow(static_cast<double>(n), 1.0 / d)));
    std::uint64_t check = 1;
    for (std::uint32_t i = 0; i < d; ++i) check *= side;
    if (check != n || side < 3)
        throw ArgError("grid lower bound needs n to be a perfect d-th power (side >= 3)");
    BoundReport r;
    r.name = "grid_lower";
    r.inputs = {{"n", static_cast<double>(n)},
                {"d", static_cast<double>(d)},
                {"k", static_cast<double>(k)}};
    double ln_8k = std::log(8.0 * static_cast<double>(k));
    double side_d = static_cast<double>(side);
    r.value = side_d * side_d / (16.0 * ln_8k);
    r.intermediates = {{"side", side_d}, {"ln_8k", ln_8k}};
    r.notes.push_back("projection of each walk onto one axis is a walk on a cycle of length side");
    return r;
}

/// Order-only speed-up floor k / (t_m ln n); no explicit constant exists, so
/// consumers compare against scaled versions of this reference.
inline BoundReport mixing_speedup_lower(std::uint32_t k, std::uint64_t t_m,
                                        std::uint64_t n) {
    if (t_m < 1) throw ArgError("mixing bound needs t_m >= 1");
    if (n < 2) throw ArgError("mixing bound needs n >= 2");
    BoundReport r;
    r.name = "mixing_speedup_lower";
    r.inputs = {{"k", static_cast<double>(k)},
                {"t_m", static_cast<double>(t_m)},
                {"n", static_cast<double>(n)}};
    double ln_n = std::log(static_cast<double>(n));
    r.value = static_cast<double>(k) / (static_cast<double>(t_m) * ln_n);
    r.intermediates = {{"ln_n", ln_n}};
    r.assumptions = {"order-only: stated up to an unspecified constant factor"};
    if (static_cast<std::uint64_t>(k) <= n)
        r.assumptions.push_back("k <= n (stated regime)");
    else
        r.failed_assumptions.push_back("k <= n violated; value extrapolated");
    return r;
}

}  // namespace kwalk
