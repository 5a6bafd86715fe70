#pragma once

#include "sspif/tableau.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sspif {

enum class Family { eSSPRK, eSSPRKplus };

const char* to_string(Family f);

/// One coefficient pair of a printed Shu--Osher row, kept as source text
/// ("59/128", "0.387392167970373", ...) for audit.
struct ShuOsherEntry {
  int i;
  int j;
  std::string alpha;
  std::string beta;
};

struct MethodRecord {
  ButcherTableau tableau;
  /// The representation as printed in the literature, when one exists.
  std::optional<ShuOsherForm> shu_osher;
  std::vector<ShuOsherEntry> source;
  double claimed_C = 0.0;
  Family family = Family::eSSPRK;
  std::string citation;

  const std::string& name() const { return tableau.name(); }
  int stages() const { return tableau.stages(); }
  int order() const { return tableau.order(); }
};

struct MethodSummary {
  std::string name;
  int stages = 0;
  int order = 0;
  double C = 0.0;
  double C_eff = 0.0;
  bool nondecreasing = false;
  Family family = Family::eSSPRK;
};

/// Builds a Shu--Osher form from source entries; alpha/beta default to 0.
ShuOsherForm shu_osher_from_entries(int stages, const std::vector<ShuOsherEntry>& entries);

/// The optimal second-order family with increasing abscissas, C = s - 1.
MethodRecord generate_second_order(int s);

/// Registry lookup.  Accepts "eSSPIFRK(s,p)" as an alias of "eSSPRK+(s,p)".
/// Throws UnknownMethod listing the registered names.
const MethodRecord& get_method(const std::string& name);

/// Every registered method in registration order.  `filter` keeps names
/// containing the substring; an empty filter keeps everything.
std::vector<MethodSummary> list_methods(const std::string& filter = "");

const std::vector<std::shared_ptr<const MethodRecord>>& all_methods();

/// Canonicalizes a user-facing method name ("eSSPIFRK(4,3)" -> "eSSPRK+(4,3)").
std::string canonical_method_name(const std::string& name);

/// Shu--Osher form used for stepping: the printed one if present, otherwise
/// the canonical form at the method's SSP coefficient.
const ShuOsherForm& stepping_form(const MethodRecord& m);

}  // namespace sspif
