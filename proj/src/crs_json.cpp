#include "crs_json.hpp"

namespace pforge {

using nlohmann::json;

json crs_to_json(const Crs& crs) {
    json j;
    if (std::holds_alternative<Geographic>(crs)) {
        j["kind"] = "geographic";
    } else if (std::holds_alternative<NonEarth>(crs)) {
        j["kind"] = "nonearth";
    } else {
        const auto& p = std::get<LccParams>(crs);
        j["kind"] = "lcc";
        j["ellipsoid"] = {{"a", p.ellipsoid.a}, {"inv_f", p.ellipsoid.inv_f}};
        j["lat_0"] = p.lat_0;
        j["lon_0"] = p.lon_0;
        j["k_0"] = p.k_0;
        j["false_easting"] = p.false_easting;
        j["false_northing"] = p.false_northing;
    }
    return j;
}

Crs crs_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw Error(ErrorKind::BadConfig, "crs needs a \"kind\" field");
    const std::string kind = j["kind"];
    if (kind == "geographic") return Geographic{};
    if (kind == "nonearth") return NonEarth{};
    if (kind != "lcc")
        throw Error(ErrorKind::BadConfig, "unknown crs kind '" + kind + "'");
    LccParams p;
    try {
        if (j.contains("ellipsoid")) {
            p.ellipsoid.a = j["ellipsoid"].at("a").get<double>();
            p.ellipsoid.inv_f = j["ellipsoid"].at("inv_f").get<double>();
        }
        p.lat_0 = j.at("lat_0").get<double>();
        p.lon_0 = j.at("lon_0").get<double>();
        p.k_0 = j.at("k_0").get<double>();
        p.false_easting = j.value("false_easting", 0.0);
        p.false_northing = j.value("false_northing", 0.0);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::BadConfig, std::string("bad lcc parameters: ") + e.what());
    }
    if (p.ellipsoid.a <= 0 || p.ellipsoid.inv_f <= 1)
        throw Error(ErrorKind::BadConfig, "invalid ellipsoid");
    if (p.lat_0 == 0 || std::fabs(p.lat_0) >= 90 || std::fabs(p.lon_0) > 180 || p.k_0 <= 0)
        throw Error(ErrorKind::BadConfig, "invalid lcc origin parameters");
    return p;
}

std::map<std::string, Crs> load_projection_registry(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::BadConfig, std::string("projection registry: ") + e.what());
    }
    if (!j.is_object())
        throw Error(ErrorKind::BadConfig, "projection registry must be a JSON object");
    std::map<std::string, Crs> out;
    for (const auto& [name, val] : j.items()) out[name] = crs_from_json(val);
    return out;
}

}  // namespace pforge
