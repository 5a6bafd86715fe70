#include "sspif/tableau_json.hpp"

#include "sspif/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sspif {

namespace {

double coefficient(const nlohmann::json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_coefficient(v.get<std::string>());
  throw InvalidArgument("tableau entry must be a number or a string, got " + v.dump());
}

Vector vector_from(const nlohmann::json& arr, const char* what) {
  if (!arr.is_array()) throw InvalidArgument(std::string("tableau field '") + what + "' must be an array");
  Vector out(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) out(static_cast<Eigen::Index>(i)) = coefficient(arr[i]);
  return out;
}

}  // namespace

RawTableau raw_tableau_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("tableau JSON must be an object");
  for (const auto& key : {"A", "b"})
    if (!j.contains(key)) throw InvalidArgument(std::string("tableau JSON missing '") + key + "'");
  RawTableau raw;
  raw.name = j.value("name", std::string("unnamed"));
  raw.order = j.value("order", 1);
  raw.b = vector_from(j.at("b"), "b");
  const auto s = raw.b.size();
  const auto& rows = j.at("A");
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != s)
    throw InvalidArgument("tableau field 'A' must have one row per stage");
  raw.A.resize(s, s);
  for (Eigen::Index i = 0; i < s; ++i) {
    const Vector row = vector_from(rows[static_cast<std::size_t>(i)], "A");
    if (row.size() != s) throw InvalidArgument("tableau field 'A' must be square");
    raw.A.row(i) = row.transpose();
  }
  if (j.contains("c") && !j.at("c").is_null()) raw.c = vector_from(j.at("c"), "c");
  return raw;
}

ButcherTableau tableau_from_json(const nlohmann::json& j) {
  RawTableau raw = raw_tableau_from_json(j);
  return ButcherTableau(std::move(raw.name), raw.order, std::move(raw.A), std::move(raw.b), std::move(raw.c));
}

nlohmann::json tableau_to_json(const ButcherTableau& t) {
  nlohmann::json j;
  j["name"] = t.name();
  j["order"] = t.order();
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < t.stages(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < t.stages(); ++k) row.push_back(t.A()(i, k));
    rows.push_back(row);
  }
  j["A"] = rows;
  j["b"] = std::vector<double>(t.b().data(), t.b().data() + t.b().size());
  j["c"] = std::vector<double>(t.c().data(), t.c().data() + t.c().size());
  return j;
}

ButcherTableau load_tableau(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
  return tableau_from_json(j);
}

void save_tableau(const ButcherTableau& t, const std::string& path) {
  write_file_atomic(path, tableau_to_json(t).dump(2) + "\n");
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw Error("failed writing " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace sspif
