#pragma once

#include "sspif/tableau.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace sspif {

/// Tableau data as read from a JSON file, before any invariant checks.
struct RawTableau {
  std::string name;
  int order = 1;
  Matrix A;
  Vector b;
  std::optional<Vector> c;
};

/// {"name", "order", "A": [[...]], "b": [...], "c": [...] (optional)}; entries
/// may be numbers or strings holding "p/q" rationals or decimals.
RawTableau raw_tableau_from_json(const nlohmann::json& j);
ButcherTableau tableau_from_json(const nlohmann::json& j);

/// Emits numbers with 17 significant digits (round-trip exact).
nlohmann::json tableau_to_json(const ButcherTableau& t);

ButcherTableau load_tableau(const std::string& path);
void save_tableau(const ButcherTableau& t, const std::string& path);

}  // namespace sspif
