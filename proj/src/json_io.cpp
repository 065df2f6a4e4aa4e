#include "loewner/json_io.hpp"

#include <fstream>

namespace loewner {

OrderedJson complex_to_json(Complex c) { return OrderedJson::array({c.real(), c.imag()}); }

Complex complex_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw std::invalid_argument("expected a complex number as [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

OrderedJson point_to_json(const Point2& z) {
    return OrderedJson::array({complex_to_json(z.z1), complex_to_json(z.z2)});
}

Point2 point_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument("expected a point as [[re,im],[re,im]]");
    return {complex_from_json(j[0]), complex_from_json(j[1])};
}

OrderedJson series_to_json(const PowerSeriesMap2& f) {
    OrderedJson j;
    j["trunc_degree"] = f.trunc_degree();
    for (int comp = 1; comp <= 2; ++comp) {
        OrderedJson terms = OrderedJson::array();
        for (const auto& t : f.component(comp)) {
            OrderedJson rec;
            rec["a1"] = t.index.e1;
            rec["a2"] = t.index.e2;
            rec["re"] = t.value.real();
            rec["im"] = t.value.imag();
            terms.push_back(std::move(rec));
        }
        j[comp == 1 ? "component1" : "component2"] = std::move(terms);
    }
    return j;
}

PowerSeriesMap2 series_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("trunc_degree") ||
        !j["trunc_degree"].is_number_integer())
        throw std::invalid_argument("series file: missing integer field 'trunc_degree'");
    const int trunc = j["trunc_degree"].get<int>();

    auto read_component = [&j](const char* key) {
        std::vector<SeriesTerm> terms;
        if (!j.contains(key)) return terms;
        const auto& arr = j[key];
        if (!arr.is_array())
            throw std::invalid_argument(std::string("series file: '") + key +
                                        "' must be an array of terms");
        for (const auto& rec : arr) {
            if (!rec.is_object() || !rec.contains("a1") || !rec.contains("a2") ||
                !rec.contains("re") || !rec.contains("im") || !rec["a1"].is_number_integer() ||
                !rec["a2"].is_number_integer() || !rec["re"].is_number() ||
                !rec["im"].is_number())
                throw std::invalid_argument(
                    "series file: each term needs integer a1, a2 and numeric re, im");
            terms.push_back({{rec["a1"].get<int>(), rec["a2"].get<int>()},
                             {rec["re"].get<double>(), rec["im"].get<double>()}});
        }
        return terms;
    };
    return PowerSeriesMap2(trunc, read_component("component1"), read_component("component2"));
}

OrderedJson shear_to_json(const ShearMap& s) {
    OrderedJson j;
    j["lambda"] = complex_to_json(s.lambda);
    j["mu"] = complex_to_json(s.mu);
    j["A"] = complex_to_json(s.A);
    return j;
}

ShearMap shear_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("lambda") || !j.contains("mu") || !j.contains("A"))
        throw std::invalid_argument("shear file: expected fields lambda, mu, A");
    return {complex_from_json(j["lambda"]), complex_from_json(j["mu"]),
            complex_from_json(j["A"])};
}

OrderedJson membership_to_json(const MembershipReport& r) {
    OrderedJson j;
    j["verdict"] = r.verdict();
    j["max_defect"] = r.max_defect;
    j["witness"] = point_to_json(r.witness);
    j["samples_used"] = r.samples_used;
    j["seed"] = r.seed;
    return j;
}

OrderedJson starlike_to_json(const StarlikeReport& r) {
    OrderedJson j;
    j["verdict"] = r.verdict();
    j["min_margin"] = r.min_margin;
    j["witness"] = point_to_json(r.witness);
    j["samples_used"] = r.samples_used;
    j["seed"] = r.seed;
    return j;
}

OrderedJson bound_to_json(const BoundResult& b) {
    OrderedJson j;
    j["bound"] = b.bound;
    j["direction"] = OrderedJson::array({b.direction_x, b.direction_y});
    return j;
}

OrderedJson coefficient_flow_to_json(const CoefficientFlow& f) {
    OrderedJson j;
    j["s"] = f.s;
    j["t"] = f.t;
    j["a_st"] = complex_to_json(f.a_st);
    j["q_profile"] = f.q_profile;
    return j;
}

OrderedJson reproduction_to_json(const ReproductionReport& r) {
    OrderedJson j;
    j["computed_bound"] = bound_to_json(r.bound);
    j["functional_at_candidate"] = complex_to_json(r.functional_at_candidate);
    j["sharpness_ok"] = r.sharpness_ok;
    j["field_membership"] = membership_to_json(r.field_membership);
    j["mminus_ok"] = r.mminus_ok;
    j["starlikeness"] = starlike_to_json(r.starlikeness);
    j["starlike_ok"] = r.starlike_ok;
    j["chain_recovery_error"] = r.chain_recovery_error;
    j["chain_ok"] = r.chain_ok;
    j["envelope_limit_error"] = r.envelope_limit_error;
    j["envelope_ok"] = r.envelope_ok;
    j["low_confidence"] = r.low_confidence;
    j["all_ok"] = r.all_ok();
    return j;
}

QProfile qprofile_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty())
        throw std::invalid_argument(
            "q profile: expected a non-empty array of {t_start, value} segments");
    std::vector<QProfile::Segment> segments;
    segments.reserve(j.size());
    for (const auto& rec : j) {
        if (!rec.is_object() || !rec.contains("t_start") || !rec.contains("value") ||
            !rec["t_start"].is_number())
            throw std::invalid_argument(
                "q profile: each segment needs numeric t_start and value [re,im]");
        segments.push_back({rec["t_start"].get<double>(), complex_from_json(rec["value"])});
    }
    if (segments.size() == 1) return QProfile::constant(segments.front().value);
    return QProfile::piecewise(std::move(segments));
}

OrderedJson qprofile_to_json(const QProfile& q) {
    if (!q.is_piecewise_constant())
        throw std::invalid_argument("q profile: only piecewise-constant profiles serialize");
    OrderedJson arr = OrderedJson::array();
    for (const auto& seg : q.segments()) {
        OrderedJson rec;
        rec["t_start"] = seg.t_start;
        rec["value"] = complex_to_json(seg.value);
        arr.push_back(std::move(rec));
    }
    return arr;
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    return nlohmann::json::parse(in);  // throws nlohmann::json::parse_error on bad input
}

PowerSeriesMap2 read_series_file(const std::string& path) {
    return series_from_json(read_json_file(path));
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("failed writing file: " + path);
}

}  // namespace loewner
