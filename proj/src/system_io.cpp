#include <fstream>
#include <sstream>

#include <json.hpp>

#include "selfaffine/affine_system.hpp"

namespace selfaffine {

namespace {

using nlohmann::json;

Rational rational_from_json(const json& j, const std::string& where) {
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw StructuralError(where + ": " + e.what());
    }
  }
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw StructuralError(where + ": expected a \"p/q\" string, got " + j.dump());
}

std::vector<Point> points_from_json(const json& j, const std::string& key, std::size_t dim) {
  if (!j.contains(key) || !j[key].is_array()) throw StructuralError("missing array \"" + key + "\"");
  std::vector<Point> out;
  for (std::size_t i = 0; i < j[key].size(); ++i) {
    const json& row = j[key][i];
    const std::string where = key + "[" + std::to_string(i) + "]";
    if (!row.is_array() || row.size() != dim) {
      throw StructuralError(where + ": expected " + std::to_string(dim) + " coordinates");
    }
    Point p;
    for (std::size_t k = 0; k < dim; ++k) p.push_back(rational_from_json(row[k], where));
    out.push_back(std::move(p));
  }
  return out;
}

json point_json(const Point& p) {
  json row = json::array();
  for (const auto& q : p) row.push_back(to_string(q));
  return row;
}

}  // namespace

AffineSystem parse_system_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw StructuralError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw StructuralError("system file must be a JSON object");
  if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<long>() < 1) {
    throw StructuralError("\"dim\" must be a positive integer");
  }
  const auto dim = j["dim"].get<std::size_t>();
  const auto rows = points_from_json(j, "R", dim);
  if (rows.size() != dim) throw StructuralError("\"R\" must have " + std::to_string(dim) + " rows");
  auto B = points_from_json(j, "B", dim);
  auto L = points_from_json(j, "L", dim);
  std::string name = j.value("name", std::string{});
  return AffineSystem(ScalingMatrix(RationalMatrix::from_rows(rows)), std::move(B), std::move(L), name);
}

AffineSystem load_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open system file \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_system_json(ss.str());
}

std::string system_to_json(const AffineSystem& sys) {
  json j;
  if (!sys.name().empty()) j["name"] = sys.name();
  j["dim"] = sys.dim();
  json r = json::array();
  for (std::size_t i = 0; i < sys.dim(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < sys.dim(); ++k) row.push_back(to_string(sys.R().matrix()(i, k)));
    r.push_back(row);
  }
  j["R"] = r;
  j["B"] = json::array();
  for (const auto& b : sys.B()) j["B"].push_back(point_json(b));
  j["L"] = json::array();
  for (const auto& l : sys.L()) j["L"].push_back(point_json(l));
  return j.dump(2);
}

}  // namespace selfaffine
