#include "sspif/method_library.hpp"

#include "sspif/ssp_radius.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>

namespace sspif {

const char* to_string(Family f) { return f == Family::eSSPRKplus ? "eSSPRK+" : "eSSPRK"; }

namespace {

// Source strings may combine printed terms as "x + y".
double parse_sum(const std::string& text) {
  double total = 0.0;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(" + ", start);
    total += parse_coefficient(std::string_view(text).substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 3;
  }
  return total;
}

}  // namespace

ShuOsherForm shu_osher_from_entries(int stages, const std::vector<ShuOsherEntry>& entries) {
  Matrix alpha = Matrix::Zero(stages + 1, stages + 1);
  Matrix beta = Matrix::Zero(stages + 1, stages + 1);
  for (const auto& e : entries) {
    if (e.i < 1 || e.i > stages || e.j < 0 || e.j >= e.i)
      throw InvalidArgument("Shu-Osher entry out of range");
    alpha(e.i, e.j) = parse_sum(e.alpha);
    beta(e.i, e.j) = parse_sum(e.beta);
  }
  return ShuOsherForm(std::move(alpha), std::move(beta));
}

namespace {

MethodRecord make_record(std::string name, int stages, int order, std::vector<ShuOsherEntry> source,
                         double claimed_C, Family family, std::string citation) {
  ShuOsherForm so = shu_osher_from_entries(stages, source);
  ButcherTableau tab = shu_osher_to_butcher(so, std::move(name), order);
  return MethodRecord{std::move(tab), std::move(so), std::move(source), claimed_C, family, std::move(citation)};
}

// Entries {i, j, alpha, beta}: u^{(i)} += alpha u^{(j)} + dt beta F(u^{(j)}).

MethodRecord ssprk22() {
  return make_record("eSSPRK(2,2)", 2, 2,
                     {{1, 0, "1", "1"}, {2, 0, "1/2", "0"}, {2, 1, "1/2", "1/2"}},
                     1.0, Family::eSSPRK, "Shu & Osher (1988), optimal two-stage second order");
}

MethodRecord ssprk33() {
  return make_record("eSSPRK(3,3)", 3, 3,
                     {{1, 0, "1", "1"},
                      {2, 0, "3/4", "0"}, {2, 1, "1/4", "1/4"},
                      {3, 0, "1/3", "0"}, {3, 2, "2/3", "2/3"}},
                     1.0, Family::eSSPRK, "Shu & Osher (1988), the Shu-Osher method");
}

MethodRecord ssprk43() {
  return make_record("eSSPRK(4,3)", 4, 3,
                     {{1, 0, "1", "1/2"},
                      {2, 1, "1", "1/2"},
                      {3, 0, "2/3", "0"}, {3, 2, "1/3", "1/6"},
                      {4, 3, "1", "1/2"}},
                     2.0, Family::eSSPRK, "Kraaijevanger (1991); four-stage third order, C = 2");
}

MethodRecord ssprk54() {
  return make_record("eSSPRK(5,4)", 5, 4,
                     {{1, 0, "1", "0.391752226571890"},
                      {2, 0, "0.444370493651235", "0"},
                      {2, 1, "0.555629506348765", "0.368410593050371"},
                      {3, 0, "0.620101851488403", "0"},
                      {3, 2, "0.379898148511597", "0.251891774271694"},
                      {4, 0, "0.178079954393132", "0"},
                      {4, 3, "0.821920045606868", "0.544974750228521"},
                      {5, 2, "0.517231671970585", "0"},
                      {5, 3, "0.096059710526147", "0.063692468666290"},
                      {5, 4, "0.386708617503268", "0.226007483236906"}},
                     1.508, Family::eSSPRK, "Spiteri & Ruuth (2002)");
}

MethodRecord ssprk104() {
  std::vector<ShuOsherEntry> e;
  for (int i = 1; i <= 4; ++i) e.push_back({i, i - 1, "1", "1/6"});
  e.push_back({5, 0, "3/5", "0"});
  e.push_back({5, 4, "2/5", "1/15"});
  for (int i = 6; i <= 9; ++i) e.push_back({i, i - 1, "1", "1/6"});
  e.push_back({10, 0, "1/25", "0"});
  e.push_back({10, 4, "9/25", "3/50"});
  e.push_back({10, 9, "3/5", "1/10"});
  return make_record("eSSPRK(10,4)", 10, 4, std::move(e), 6.0, Family::eSSPRK,
                     "Ketcheson (2008), low-storage ten-stage fourth order");
}

MethodRecord ssprk33_plus() {
  // Final row takes the u^n forward-Euler term (b = [1/4, 3/16, 9/16]).
  return make_record("eSSPRK+(3,3)", 3, 3,
                     {{1, 0, "1", "2/3"},
                      {2, 0, "2/3", "0"}, {2, 1, "1/3", "4/9"},
                      {3, 0, "59/128 + 15/128", "5/32"}, {3, 2, "27/64", "9/16"}},
                     0.75, Family::eSSPRKplus, "optimal three-stage third order with non-decreasing abscissas");
}

MethodRecord ssprk43_plus() {
  return make_record("eSSPRK+(4,3)", 4, 3,
                     {{1, 0, "1", "11/20"},
                      {2, 0, "3/8", "0"}, {2, 1, "5/8", "55/160"},
                      {3, 0, "4/9", "0"}, {3, 2, "5/9", "55/180"},
                      {4, 0, "111/1331 + 260/1331", "143/1331"}, {4, 3, "960/1331", "528/1331"}},
                     20.0 / 11.0, Family::eSSPRKplus, "four-stage third order, rational, C = 20/11");
}

MethodRecord ssprk93_plus() {
  std::vector<ShuOsherEntry> e;
  for (int i = 1; i <= 4; ++i) e.push_back({i, i - 1, "1", "1/6"});
  e.push_back({5, 0, "1/5", "0"});
  e.push_back({5, 4, "4/5", "4/30"});
  e.push_back({6, 0, "1/4", "1/24"});
  e.push_back({6, 5, "3/4", "3/24"});
  e.push_back({7, 2, "1/3", "0"});
  e.push_back({7, 6, "2/3", "2/18"});
  e.push_back({8, 7, "1", "1/6"});
  e.push_back({9, 8, "1", "1/6"});
  return make_record("eSSPRK+(9,3)", 9, 3, std::move(e), 6.0, Family::eSSPRKplus,
                     "nine-stage third order, rational, C = 6");
}

// Fourth-order rows are printed as alpha_ij (u^{(j)} + dt/r F(u^{(j)})) plus
// a pure alpha u^n term; beta_ij = (forward-Euler weight) / r.
constexpr const char* kR54 = "1.346586417284006";
constexpr const char* kR64 = "2.273802749301517";

std::string over(const std::string& num, const char* r) { return num + "/" + r; }

MethodRecord ssprk54_plus() {
  return make_record(
      "eSSPRK+(5,4)", 5, 4,
      {{1, 0, "1", over("0.612607832029627", kR54)},
       {2, 0, "0.568702484115635", "0"},
       {2, 1, "0.431297515884365", over("0.431297515884365", kR54)},
       {3, 0, "0.589791736452092", "0"},
       {3, 2, "0.410208263547908", over("0.410208263547908", kR54)},
       {4, 0, "0.213474206786188", "0"},
       {4, 3, "0.786525793213812", over("0.786525793213812", kR54)},
       {5, 0, "0.270147144537063 + 0.029337521506634", over("0.029337521506634", kR54)},
       {5, 1, "0.239419175840559", over("0.239419175840559", kR54)},
       {5, 3, "0.227000995504038", over("0.227000995504038", kR54)},
       {5, 4, "0.234095162611706", over("0.234095162611706", kR54)}},
      parse_coefficient(kR54), Family::eSSPRKplus, "five-stage fourth order, C = 1.346586417284006");
}

MethodRecord ssprk64_plus() {
  return make_record(
      "eSSPRK+(6,4)", 6, 4,
      {{1, 0, "1", over("1", kR64)},
       {2, 0, "0.486695314011133", "0"},
       {2, 1, "0.513304685988867", over("0.513304685988867", kR64)},
       {3, 0, "0.387273961537322", "0"},
       {3, 2, "0.612726038462678", over("0.612726038462678", kR64)},
       {4, 0, "0.419340376206590 + 0.048271190433595", over("0.048271190433595", kR64)},
       {4, 3, "0.532388433359815", over("0.532388433359815", kR64)},
       {5, 4, "1", over("1", kR64)},
       {6, 0, "0.122021674306995", "0"},
       {6, 1, "0.104714614292281", over("0.104714614292281", kR64)},
       {6, 2, "0.316675962670361", over("0.316675962670361", kR64)},
       {6, 4, "0.057551178672633", over("0.057551178672633", kR64)},
       {6, 5, "0.399036570057730", over("0.399036570057730", kR64)}},
      parse_coefficient(kR64), Family::eSSPRKplus, "six-stage fourth order, C = 2.273802749301517");
}

struct Registry {
  std::vector<std::shared_ptr<const MethodRecord>> methods;
};

void self_check(const MethodRecord& m) {
  const double radius = ssp_radius(m.tableau).radius;
  if (radius < m.claimed_C - 1e-4) {
    std::ostringstream msg;
    msg << m.name() << ": SSP radius " << radius << " below claimed " << m.claimed_C;
    throw Error(msg.str());
  }
  if (m.family == Family::eSSPRKplus && !abscissas_nondecreasing(m.tableau))
    throw Error(m.name() + ": eSSPRK+ method with decreasing abscissas");
  if (order_residuals(m.tableau).achieved_order < m.order())
    throw Error(m.name() + ": order conditions not met");
}

const Registry& registry() {
  static const Registry reg = [] {
    Registry r;
    auto add = [&](MethodRecord m) {
      self_check(m);
      r.methods.push_back(std::make_shared<const MethodRecord>(std::move(m)));
    };
    add(ssprk22());
    add(ssprk33());
    add(ssprk43());
    add(ssprk54());
    add(ssprk104());
    for (int s = 2; s <= 10; ++s) add(generate_second_order(s));
    add(ssprk33_plus());
    add(ssprk43_plus());
    add(ssprk93_plus());
    add(ssprk54_plus());
    add(ssprk64_plus());
    return r;
  }();
  return reg;
}

std::string strip_spaces(const std::string& s) {
  std::string out;
  for (char ch : s)
    if (!std::isspace(static_cast<unsigned char>(ch))) out.push_back(ch);
  return out;
}

}  // namespace

MethodRecord generate_second_order(int s) {
  if (s < 2) throw InvalidArgument("second-order family needs s >= 2");
  const std::string h = "1/" + std::to_string(s - 1);
  std::vector<ShuOsherEntry> e;
  for (int i = 1; i <= s - 1; ++i) e.push_back({i, i - 1, "1", h});
  e.push_back({s, 0, "1/" + std::to_string(s), "0"});
  e.push_back({s, s - 1, std::to_string(s - 1) + "/" + std::to_string(s), "1/" + std::to_string(s)});
  return make_record("eSSPRK+(" + std::to_string(s) + ",2)", s, 2, std::move(e), s - 1.0, Family::eSSPRKplus,
                     "optimal s-stage second order, C = s - 1");
}

std::string canonical_method_name(const std::string& name) {
  std::string n = strip_spaces(name);
  const std::string if_prefix = "eSSPIFRK(";
  if (n.rfind(if_prefix, 0) == 0) n = "eSSPRK+(" + n.substr(if_prefix.size());
  const std::string plus_word = "eSSPRKplus(";
  if (n.rfind(plus_word, 0) == 0) n = "eSSPRK+(" + n.substr(plus_word.size());
  return n;
}

const std::vector<std::shared_ptr<const MethodRecord>>& all_methods() { return registry().methods; }

const MethodRecord& get_method(const std::string& name) {
  const std::string key = canonical_method_name(name);
  for (const auto& m : all_methods())
    if (m->name() == key) return *m;
  std::ostringstream msg;
  msg << "unknown method '" << name << "'; available:";
  for (const auto& m : all_methods()) msg << ' ' << m->name();
  throw UnknownMethod(msg.str());
}

std::vector<MethodSummary> list_methods(const std::string& filter) {
  std::vector<MethodSummary> out;
  for (const auto& m : all_methods()) {
    if (!filter.empty() && m->name().find(filter) == std::string::npos) continue;
    const double C = ssp_radius(m->tableau).radius;
    out.push_back({m->name(), m->stages(), m->order(), C, C / m->stages(),
                   abscissas_nondecreasing(m->tableau), m->family});
  }
  return out;
}

const ShuOsherForm& stepping_form(const MethodRecord& m) {
  if (m.shu_osher) return *m.shu_osher;
  static std::mutex mu;
  static std::vector<std::pair<const MethodRecord*, std::unique_ptr<ShuOsherForm>>> cache;
  std::lock_guard lock(mu);
  for (const auto& [key, form] : cache)
    if (key == &m) return *form;
  cache.emplace_back(&m, std::make_unique<ShuOsherForm>(butcher_to_canonical_shu_osher(m.tableau, m.claimed_C)));
  return *cache.back().second;
}

}  // namespace sspif
