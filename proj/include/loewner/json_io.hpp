#pragma once

// JSON (de)serialization for all value types plus small file helpers. All
// emitters use ordered JSON with a fixed field order so identical inputs
// produce byte-identical output.

#include <nlohmann/json.hpp>
#include <string>

#include "loewner/analysis.hpp"
#include "loewner/flow.hpp"
#include "loewner/mminus.hpp"
#include "loewner/series.hpp"
#include "loewner/shear.hpp"

namespace loewner {

using OrderedJson = nlohmann::ordered_json;

OrderedJson complex_to_json(Complex c);        // [re, im]
Complex complex_from_json(const nlohmann::json& j);

OrderedJson point_to_json(const Point2& z);    // [[re,im],[re,im]]
Point2 point_from_json(const nlohmann::json& j);

// {"trunc_degree": d, "component1": [{"a1","a2","re","im"}...], "component2": [...]}
// Terms are emitted in canonical (graded-lexicographic) order; absent
// indices mean zero; doubles round-trip bit-exactly.
OrderedJson series_to_json(const PowerSeriesMap2& f);
PowerSeriesMap2 series_from_json(const nlohmann::json& j);

// {"lambda": [re,im], "mu": [re,im], "A": [re,im]}
OrderedJson shear_to_json(const ShearMap& s);
ShearMap shear_from_json(const nlohmann::json& j);

// {"verdict","max_defect","witness","samples_used","seed"}
OrderedJson membership_to_json(const MembershipReport& r);
// {"verdict","min_margin","witness","samples_used","seed"}
OrderedJson starlike_to_json(const StarlikeReport& r);
OrderedJson bound_to_json(const BoundResult& b);
OrderedJson coefficient_flow_to_json(const CoefficientFlow& f);
OrderedJson reproduction_to_json(const ReproductionReport& r);

// Array of {"t_start": float, "value": [re,im]} segments, ascending t_start.
QProfile qprofile_from_json(const nlohmann::json& j);
OrderedJson qprofile_to_json(const QProfile& q);

nlohmann::json read_json_file(const std::string& path);
PowerSeriesMap2 read_series_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace loewner
