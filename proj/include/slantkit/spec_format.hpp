#pragma once

// JSON manifold specs: schema checks, canonical form, digest, and model construction.

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "slantkit/distribution.hpp"
#include "slantkit/random.hpp"
#include "slantkit/tolerances.hpp"

namespace slantkit {

using Json = nlohmann::json;

struct SampleBox {
    std::uint64_t seed = default_seed;
    std::size_t count = 16;
    double lo = -2.0;
    double hi = 2.0;
};

using ExprMatrix = std::vector<std::vector<std::string>>;

struct ManifoldSpec {
    std::size_t ambient_dim = 0;
    int epsilon = -1;
    StructureKind kind = StructureKind::hermitian_like;
    std::optional<ExprMatrix> metric;  // rows; empty means euclidean
    ExprMatrix phi_columns;
    std::optional<std::vector<std::string>> xi;
    std::optional<std::vector<std::size_t>> submanifold_mask;  // 1-based
    std::map<std::string, ExprMatrix> distributions;
    bool has_decomposition = true;  // false: discover components from f^2
    std::optional<std::string> invariant;
    std::vector<std::string> proper;
    std::variant<std::vector<std::vector<double>>, SampleBox> sample_points = SampleBox{};
    std::map<std::string, double> tolerances;
};

namespace spec_detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& message) {
    throw SpecError(path + ": " + message);
}

inline const std::vector<std::pair<std::string, double Tolerances::*>>& tolerance_fields() {
    static const std::vector<std::pair<std::string, double Tolerances::*>> fields{
        {"structure", &Tolerances::structure},
        {"cluster", &Tolerances::cluster},
        {"angle_const", &Tolerances::angle_const},
        {"angle_distinct", &Tolerances::angle_distinct},
        {"generic_margin", &Tolerances::generic_margin},
        {"identity", &Tolerances::identity},
        {"dual", &Tolerances::dual},
        {"zero_threshold", &Tolerances::zero_threshold},
        {"fd_step", &Tolerances::fd_step},
    };
    return fields;
}

inline std::string expression(const Json& j, const std::string& path) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number()) return ast::format_number(j.get<double>());
    fail(path, "expected an expression string or a number");
}

inline std::vector<std::string> expression_row(const Json& j, std::size_t n, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of " + std::to_string(n) + " expressions");
    if (j.size() != n) fail(path, "expected " + std::to_string(n) + " entries, got " + std::to_string(j.size()));
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(expression(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

inline ExprMatrix expression_matrix(const Json& j, std::size_t rows, std::size_t n, const std::string& path) {
    if (!j.is_array() || j.size() != rows) fail(path, "expected an array of " + std::to_string(rows) + " rows");
    ExprMatrix out;
    for (std::size_t r = 0; r < rows; ++r) out.push_back(expression_row(j[r], n, path + "[" + std::to_string(r) + "]"));
    return out;
}

inline double finite_number(const Json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "expected a finite number");
    return v;
}

inline std::uint64_t unsigned_integer(const Json& j, const std::string& path) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
        fail(path, "expected a non-negative integer");
    return j.get<std::uint64_t>();
}

}  // namespace spec_detail

inline ManifoldSpec spec_from_json(const Json& j) {
    using namespace spec_detail;
    if (!j.is_object()) fail("$", "spec must be a JSON object");
    static const std::set<std::string> known{"ambient_dim", "epsilon",        "kind",          "metric",
                                             "phi_columns", "xi",             "submanifold_mask",
                                             "distributions", "decomposition", "sample_points", "tolerances"};
    for (const auto& [key, value] : j.items())
        if (!known.contains(key)) fail("$." + key, "unknown field");
    for (const char* key : {"ambient_dim", "epsilon", "kind", "phi_columns", "distributions"})
        if (!j.contains(key)) fail(std::string("$.") + key, "missing required field");

    ManifoldSpec s;
    const auto n = unsigned_integer(j["ambient_dim"], "$.ambient_dim");
    if (n == 0) fail("$.ambient_dim", "must be positive");
    s.ambient_dim = static_cast<std::size_t>(n);

    if (!j["epsilon"].is_number_integer()) fail("$.epsilon", "must be +1 or -1");
    const auto eps = j["epsilon"].get<std::int64_t>();
    if (eps != 1 && eps != -1) fail("$.epsilon", "must be +1 or -1, got " + std::to_string(eps));
    s.epsilon = static_cast<int>(eps);

    if (!j["kind"].is_string()) fail("$.kind", "must be \"hermitian-like\" or \"contact-like\"");
    const auto kind = parse_kind(j["kind"].get<std::string>());
    if (!kind) fail("$.kind", "must be \"hermitian-like\" or \"contact-like\"");
    s.kind = *kind;

    if (j.contains("metric")) {
        const auto& m = j["metric"];
        if (m.is_string()) {
            if (m.get<std::string>() != "euclidean") fail("$.metric", "expected \"euclidean\" or a matrix");
        } else {
            s.metric = expression_matrix(m, s.ambient_dim, s.ambient_dim, "$.metric");
        }
    }

    s.phi_columns = expression_matrix(j["phi_columns"], s.ambient_dim, s.ambient_dim, "$.phi_columns");

    if (j.contains("xi") && !j["xi"].is_null()) s.xi = expression_row(j["xi"], s.ambient_dim, "$.xi");
    if (s.kind == StructureKind::contact_like && !s.xi) fail("$.xi", "contact-like structures need xi");
    if (s.kind == StructureKind::hermitian_like && s.xi) fail("$.xi", "hermitian-like structures take no xi");

    if (j.contains("submanifold_mask") && !j["submanifold_mask"].is_null()) {
        const auto& m = j["submanifold_mask"];
        if (!m.is_array() || m.empty()) fail("$.submanifold_mask", "expected a non-empty array of coordinate indices");
        std::vector<std::size_t> mask;
        for (std::size_t i = 0; i < m.size(); ++i) {
            const std::string path = "$.submanifold_mask[" + std::to_string(i) + "]";
            const auto c = unsigned_integer(m[i], path);
            if (c < 1 || c > s.ambient_dim) fail(path, "index outside 1.." + std::to_string(s.ambient_dim));
            if (std::find(mask.begin(), mask.end(), c) != mask.end()) fail(path, "duplicate index");
            mask.push_back(static_cast<std::size_t>(c));
        }
        std::sort(mask.begin(), mask.end());
        s.submanifold_mask = std::move(mask);
    }

    const auto& dists = j["distributions"];
    if (!dists.is_object() || dists.empty()) fail("$.distributions", "expected a non-empty object of named distributions");
    for (const auto& [name, fields] : dists.items()) {
        const std::string path = "$.distributions." + name;
        if (name.empty()) fail(path, "distribution names must be non-empty");
        if (!fields.is_array() || fields.empty()) fail(path, "expected a non-empty array of vector fields");
        s.distributions[name] = expression_matrix(fields, fields.size(), s.ambient_dim, path);
    }

    if (!j.contains("decomposition") || j["decomposition"].is_null()) {
        s.has_decomposition = false;
    } else {
        const auto& d = j["decomposition"];
        if (!d.is_object()) fail("$.decomposition", "expected an object with \"invariant\" and \"proper\"");
        for (const auto& [key, value] : d.items())
            if (key != "invariant" && key != "proper") fail("$.decomposition." + key, "unknown field");
        std::set<std::string> used;
        auto use = [&](const Json& v, const std::string& path) {
            if (!v.is_string()) fail(path, "expected a distribution name");
            const auto name = v.get<std::string>();
            if (!s.distributions.contains(name)) fail(path, "unknown distribution '" + name + "'");
            if (!used.insert(name).second) fail(path, "distribution '" + name + "' used twice");
            return name;
        };
        if (d.contains("invariant") && !d["invariant"].is_null()) s.invariant = use(d["invariant"], "$.decomposition.invariant");
        if (d.contains("proper")) {
            const auto& p = d["proper"];
            if (!p.is_array()) fail("$.decomposition.proper", "expected an array of distribution names");
            for (std::size_t i = 0; i < p.size(); ++i)
                s.proper.push_back(use(p[i], "$.decomposition.proper[" + std::to_string(i) + "]"));
        }
        if (!s.invariant && s.proper.empty()) fail("$.decomposition", "names no distributions");
    }

    if (j.contains("sample_points")) {
        const auto& sp = j["sample_points"];
        if (sp.is_array()) {
            if (sp.empty()) fail("$.sample_points", "expected at least one point");
            std::vector<std::vector<double>> pts;
            for (std::size_t i = 0; i < sp.size(); ++i) {
                const std::string path = "$.sample_points[" + std::to_string(i) + "]";
                if (!sp[i].is_array() || sp[i].size() != s.ambient_dim)
                    fail(path, "expected " + std::to_string(s.ambient_dim) + " coordinates");
                std::vector<double> pt;
                for (std::size_t c = 0; c < s.ambient_dim; ++c)
                    pt.push_back(finite_number(sp[i][c], path + "[" + std::to_string(c) + "]"));
                if (s.submanifold_mask)
                    for (std::size_t c = 0; c < s.ambient_dim; ++c)
                        if (pt[c] != 0.0 &&
                            std::find(s.submanifold_mask->begin(), s.submanifold_mask->end(), c + 1) == s.submanifold_mask->end())
                            fail(path, "point leaves the submanifold mask at x" + std::to_string(c + 1));
                pts.push_back(std::move(pt));
            }
            s.sample_points = std::move(pts);
        } else if (sp.is_object()) {
            for (const auto& [key, value] : sp.items())
                if (key != "seed" && key != "count" && key != "box") fail("$.sample_points." + key, "unknown field");
            SampleBox box;
            if (sp.contains("seed")) box.seed = unsigned_integer(sp["seed"], "$.sample_points.seed");
            if (sp.contains("count")) box.count = static_cast<std::size_t>(unsigned_integer(sp["count"], "$.sample_points.count"));
            if (box.count == 0) fail("$.sample_points.count", "must be positive");
            if (sp.contains("box")) {
                const auto& b = sp["box"];
                if (!b.is_array() || b.size() != 2) fail("$.sample_points.box", "expected [lo, hi]");
                box.lo = finite_number(b[0], "$.sample_points.box[0]");
                box.hi = finite_number(b[1], "$.sample_points.box[1]");
                if (!(box.lo < box.hi)) fail("$.sample_points.box", "needs lo < hi");
            }
            s.sample_points = box;
        } else {
            fail("$.sample_points", "expected an array of points or {seed, count, box}");
        }
    }

    if (j.contains("tolerances") && !j["tolerances"].is_null()) {
        const auto& t = j["tolerances"];
        if (!t.is_object()) fail("$.tolerances", "expected an object");
        for (const auto& [key, value] : t.items()) {
            const auto& fields = tolerance_fields();
            if (std::none_of(fields.begin(), fields.end(), [&](const auto& f) { return f.first == key; }))
                fail("$.tolerances." + key, "unknown tolerance");
            const double v = finite_number(value, "$.tolerances." + key);
            if (!(v > 0.0)) fail("$.tolerances." + key, "must be positive");
            s.tolerances[key] = v;
        }
    }
    return s;
}

inline Json spec_to_json(const ManifoldSpec& s) {
    Json j;
    j["ambient_dim"] = s.ambient_dim;
    j["epsilon"] = s.epsilon;
    j["kind"] = to_string(s.kind);
    if (s.metric) {
        j["metric"] = *s.metric;
    } else {
        j["metric"] = "euclidean";
    }
    j["phi_columns"] = s.phi_columns;
    if (s.xi) j["xi"] = *s.xi;
    if (s.submanifold_mask) j["submanifold_mask"] = *s.submanifold_mask;
    j["distributions"] = Json::object();
    for (const auto& [name, fields] : s.distributions) j["distributions"][name] = fields;
    if (s.has_decomposition) {
        Json d;
        d["invariant"] = s.invariant ? Json(*s.invariant) : Json(nullptr);
        d["proper"] = s.proper;
        j["decomposition"] = d;
    }
    if (const auto* pts = std::get_if<std::vector<std::vector<double>>>(&s.sample_points)) {
        j["sample_points"] = *pts;
    } else {
        const auto& box = std::get<SampleBox>(s.sample_points);
        j["sample_points"] = {{"seed", box.seed}, {"count", box.count}, {"box", {box.lo, box.hi}}};
    }
    if (!s.tolerances.empty()) j["tolerances"] = s.tolerances;
    return j;
}

inline ManifoldSpec parse_spec_text(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw SpecError(std::string("invalid JSON: ") + e.what());
    }
    return spec_from_json(j);
}

inline ManifoldSpec load_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpecError("cannot read spec file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_spec_text(buf.str());
}

// Sorted keys, shortest round-trip numbers, no insignificant whitespace.
inline std::string canonical_dump(const ManifoldSpec& s) { return spec_to_json(s).dump(); }

inline std::string sha256_hex(const std::string& data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

inline std::string spec_digest(const ManifoldSpec& s) { return sha256_hex(canonical_dump(s)); }

inline Tolerances tolerances_of(const ManifoldSpec& s) {
    Tolerances t;
    for (const auto& [key, value] : s.tolerances)
        for (const auto& [name, member] : spec_detail::tolerance_fields())
            if (name == key) t.*member = value;
    return t;
}

// Uniform points in [lo, hi] on the masked coordinates, zero elsewhere.
inline std::vector<AmbientPoint> box_points(std::size_t n, const std::optional<std::vector<std::size_t>>& mask0,
                                            const SampleBox& box) {
    std::vector<std::size_t> coords;
    if (mask0) {
        coords = *mask0;
    } else {
        for (std::size_t c = 0; c < n; ++c) coords.push_back(c);
    }
    Rng rng(box.seed);
    std::vector<AmbientPoint> out;
    for (std::size_t i = 0; i < box.count; ++i) {
        Vec x = Vec::Zero(static_cast<Eigen::Index>(n));
        for (auto c : coords) x(static_cast<Eigen::Index>(c)) = rng.uniform(box.lo, box.hi);
        out.emplace_back(std::move(x));
    }
    return out;
}

struct Model {
    std::shared_ptr<const StructureField> structure;
    Decomposition decomposition;
    std::vector<AmbientPoint> points;
    Tolerances tolerances;
};

namespace spec_detail {

inline VectorFieldExpr vector_field(const std::vector<std::string>& src, const std::string& path) {
    std::vector<ScalarFieldExpr> comps;
    for (std::size_t i = 0; i < src.size(); ++i) {
        try {
            comps.push_back(ScalarFieldExpr::parse(src[i], src.size()));
        } catch (const ParseError& e) {
            throw e.within(path + "[" + std::to_string(i) + "]");
        }
    }
    return VectorFieldExpr(std::move(comps));
}

}  // namespace spec_detail

inline Model build_model(const ManifoldSpec& s) {
    using spec_detail::vector_field;
    std::vector<VectorFieldExpr> phi;
    for (std::size_t c = 0; c < s.phi_columns.size(); ++c)
        phi.push_back(vector_field(s.phi_columns[c], "$.phi_columns[" + std::to_string(c) + "]"));
    std::optional<std::vector<VectorFieldExpr>> metric;
    if (s.metric) {
        metric.emplace();
        for (std::size_t r = 0; r < s.metric->size(); ++r)
            metric->push_back(vector_field((*s.metric)[r], "$.metric[" + std::to_string(r) + "]"));
    }
    std::optional<VectorFieldExpr> xi;
    if (s.xi) xi = vector_field(*s.xi, "$.xi");
    auto structure = std::make_shared<const StructureField>(s.epsilon, s.kind, std::move(phi), std::move(metric), std::move(xi));

    std::optional<std::vector<std::size_t>> mask0;
    if (s.submanifold_mask) {
        mask0.emplace();
        for (auto c : *s.submanifold_mask) mask0->push_back(c - 1);
    }
    auto frame = [&](const std::string& name) {
        std::vector<VectorFieldExpr> fields;
        const auto& src = s.distributions.at(name);
        for (std::size_t i = 0; i < src.size(); ++i)
            fields.push_back(vector_field(src[i], "$.distributions." + name + "[" + std::to_string(i) + "]"));
        return DistributionFrame(name, std::move(fields), mask0);
    };

    std::optional<Decomposition> dec;
    if (s.has_decomposition) {
        std::optional<DistributionFrame> inv;
        if (s.invariant) inv = frame(*s.invariant);
        std::vector<DistributionFrame> proper;
        for (const auto& name : s.proper) proper.push_back(frame(name));
        dec.emplace(structure, std::move(inv), std::move(proper), mask0);
    } else {
        std::vector<DistributionFrame> frames;
        for (const auto& [name, src] : s.distributions) frames.push_back(frame(name));
        dec.emplace(Decomposition::discovery(structure, std::move(frames), mask0));
    }

    std::vector<AmbientPoint> points;
    if (const auto* pts = std::get_if<std::vector<std::vector<double>>>(&s.sample_points)) {
        for (const auto& p : *pts) points.emplace_back(Eigen::Map<const Vec>(p.data(), static_cast<Eigen::Index>(p.size())));
    } else {
        points = box_points(s.ambient_dim, mask0, std::get<SampleBox>(s.sample_points));
    }
    return Model{std::move(structure), std::move(*dec), std::move(points), tolerances_of(s)};
}

}  // namespace slantkit
