// Flat "dotted.key = value" scenario documents. See docs/scenario-format.md.

#include <bit>
#include <charconv>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "portsim/scenario.hpp"

namespace portsim {

namespace {

struct Entry {
  std::size_t line;
  std::size_t key_col;
  std::size_t value_col;
  std::string key;
  std::string value;
};

constexpr std::string_view kSpace = " \t\r";

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(kSpace);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(kSpace);
  return s.substr(b, e - b + 1);
}

bool valid_key_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '.' ||
         c == '-';
}

bool valid_id(std::string_view id) {
  if (id.empty()) return false;
  for (char c : id)
    if (!valid_key_char(c) || c == '.') return false;
  return true;
}

std::vector<Entry> tokenize(std::string_view text) {
  std::vector<Entry> entries;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view raw = text.substr(pos, nl - pos);
    ++line_no;
    pos = nl + 1;

    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    if (trim(raw).empty()) continue;

    const auto eq = raw.find('=');
    const std::size_t first = raw.find_first_not_of(kSpace);
    if (eq == std::string_view::npos) throw ParseError(line_no, first + 1, "expected 'key = value'");
    const std::string_view key = trim(raw.substr(0, eq));
    if (key.empty()) throw ParseError(line_no, eq + 1, "missing key before '='");
    for (std::size_t i = 0; i < key.size(); ++i)
      if (!valid_key_char(key[i])) throw ParseError(line_no, first + i + 1, "invalid character in key");

    const std::string_view rest = raw.substr(eq + 1);
    const std::string_view value = trim(rest);
    const auto vstart = rest.find_first_not_of(kSpace);
    const std::size_t value_col = eq + 2 + (vstart == std::string_view::npos ? 0 : vstart);
    entries.push_back({line_no, first + 1, value_col, std::string(key), std::string(value)});
    if (nl == text.size()) break;
  }
  return entries;
}

[[noreturn]] void type_error(const Entry& e, std::string_view expected) {
  throw ParseError(e.line, e.value_col,
                   "'" + e.key + "' expects " + std::string(expected) + ", got '" + e.value + "'");
}

std::optional<double> to_real(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

double real(const Entry& e) {
  if (auto v = to_real(e.value)) return *v;
  type_error(e, "a number");
}

double capacity(const Entry& e) {
  if (e.value == "unbounded") return kUnbounded;
  return real(e);
}

int integer(const Entry& e) {
  int v = 0;
  const auto& s = e.value;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) type_error(e, "an integer");
  return v;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = s.find(',', pos);
    out.emplace_back(trim(s.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::vector<std::string> id_list(const Entry& e) {
  auto ids = split_list(e.value);
  for (const auto& id : ids)
    if (!valid_id(id)) type_error(e, "a comma-separated list of element ids");
  return ids;
}

// Items are "rate" or "rate*count".
std::vector<double> rate_list(const Entry& e) {
  std::vector<double> rates;
  for (const auto& item : split_list(e.value)) {
    const auto star = item.find('*');
    std::size_t count = 1;
    std::string_view rate = item;
    if (star != std::string::npos) {
      rate = std::string_view(item).substr(0, star);
      const std::string_view n = trim(std::string_view(item).substr(star + 1));
      auto [ptr, ec] = std::from_chars(n.data(), n.data() + n.size(), count);
      if (n.empty() || ec != std::errc{} || ptr != n.data() + n.size()) type_error(e, "rates like '6' or '6*45'");
    }
    auto v = to_real(rate);
    if (!v) type_error(e, "rates like '6' or '6*45'");
    rates.insert(rates.end(), count, *v);
  }
  return rates;
}

template <typename Enum>
Enum choice(const Entry& e, std::initializer_list<std::pair<std::string_view, Enum>> options) {
  std::string expected;
  for (const auto& [name, value] : options) {
    if (e.value == name) return value;
    expected += expected.empty() ? "" : " | ";
    expected += name;
  }
  type_error(e, expected);
}

[[noreturn]] void unknown_key(const Entry& e) {
  throw ParseError(e.line, e.key_col, "unknown key '" + e.key + "'");
}

// Splits "link.<id>.<field>" into id and field.
std::pair<std::string, std::string> element_key(const Entry& e, std::string_view prefix) {
  std::string_view rest = std::string_view(e.key).substr(prefix.size());
  const auto dot = rest.find('.');
  if (dot == std::string_view::npos || dot == 0) unknown_key(e);
  return {std::string(rest.substr(0, dot)), std::string(rest.substr(dot + 1))};
}

bool set_service_field(ServiceTimeSpec& s, std::string_view field, double v) {
  if (field == "mean_s") s.mean_s = v;
  else if (field == "sd_s") s.sd_s = v;
  else if (field == "min_s") s.min_s = v;
  else return false;
  return true;
}

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "unbounded" : "-inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += ", ";
    out += id;
  }
  return out;
}

}  // namespace

ScenarioSpec parse_scenario(std::string_view text) {
  const std::vector<Entry> entries = tokenize(text);

  ScenarioSpec spec = preset("baseline");
  bool from_scratch = false;
  std::size_t first = 0;
  if (!entries.empty() && entries.front().key == "preset") {
    try {
      spec = preset(entries.front().value);
    } catch (const ScenarioError& err) {
      throw ParseError(entries.front().line, entries.front().value_col, err.what());
    }
    first = 1;
  } else {
    for (const Entry& e : entries)
      if (e.key == "network.entry") from_scratch = true;
  }
  if (from_scratch) spec.network = Network{};

  ServiceTimeSpec global_service;
  std::set<std::string> global_fields;
  std::set<std::pair<std::string, std::string>> station_fields;

  auto link_for = [&](const std::string& id) -> Link& {
    if (Link* l = spec.network.find_link(id)) return *l;
    spec.network.links.push_back(Link{id, 0.0, kUnbounded});
    return spec.network.links.back();
  };
  auto station_for = [&](const std::string& id) -> ServiceStation& {
    if (ServiceStation* s = spec.network.find_station(id)) return *s;
    ServiceStation st;
    st.id = id;
    spec.network.stations.push_back(st);
    return spec.network.stations.back();
  };

  for (std::size_t i = first; i < entries.size(); ++i) {
    const Entry& e = entries[i];
    const std::string& k = e.key;
    if (k == "preset") {
      throw ParseError(e.line, e.key_col, "'preset' must be the first key in the document");
    } else if (k == "label") {
      spec.label = e.value;
    } else if (k == "hgv_share") {
      spec.hgv_share = real(e);
    } else if (k == "class.car.pce") {
      spec.car.pce = real(e);
    } else if (k == "class.hgv.pce") {
      spec.hgv.pce = real(e);
    } else if (k == "flow.segment_s") {
      spec.flow.segment_s = real(e);
    } else if (k == "flow.rates") {
      spec.flow.rates_veh_per_min = rate_list(e);
    } else if (k == "policy.adoption_fraction") {
      spec.policy.adoption_fraction = real(e);
    } else if (k == "policy.eligibility") {
      spec.policy.eligibility = choice<Eligibility>(e, {{"all", Eligibility::AllVehicles}, {"cars", Eligibility::CarsOnly}});
    } else if (k == "policy.on_full") {
      spec.policy.on_full = choice<OnFull>(e, {{"block", OnFull::Block}, {"divert", OnFull::Divert}});
    } else if (k.starts_with("service.")) {
      const std::string field = k.substr(8);
      if (!set_service_field(global_service, field, real(e))) unknown_key(e);
      global_fields.insert(field);
    } else if (k == "network.entry") {
      if (!valid_id(e.value)) type_error(e, "an element id");
      spec.network.entry = e.value;
    } else if (k == "route.manual") {
      spec.network.manual.elements = id_list(e);
    } else if (k == "route.automated") {
      if (e.value == "none") spec.network.automated.reset();
      else spec.network.automated = RouteSpec{id_list(e)};
    } else if (k.starts_with("link.")) {
      auto [id, field] = element_key(e, "link.");
      if (spec.network.find_station(id)) throw ParseError(e.line, e.key_col, "'" + id + "' is already a station");
      Link& link = link_for(id);
      if (field == "free_flow_s") link.free_flow_s = real(e);
      else if (field == "capacity_pce") link.capacity_pce = capacity(e);
      else unknown_key(e);
    } else if (k.starts_with("station.")) {
      auto [id, field] = element_key(e, "station.");
      if (spec.network.find_link(id)) throw ParseError(e.line, e.key_col, "'" + id + "' is already a link");
      ServiceStation& st = station_for(id);
      if (field == "discipline") {
        st.discipline = choice<Discipline>(
            e, {{"per_lane", Discipline::PerLaneShortestQueue}, {"shared_fifo", Discipline::SharedFifo}});
      } else if (field == "lanes") {
        st.lane_count = integer(e);
      } else if (field == "capacity_pce") {
        st.capacity_pce = capacity(e);
      } else if (field == "servers") {
        st.servers_open = integer(e);
      } else if (field.starts_with("service.")) {
        const std::string sub = field.substr(8);
        if (!set_service_field(st.service, sub, real(e))) unknown_key(e);
        station_fields.insert({id, sub});
      } else {
        unknown_key(e);
      }
    } else {
      unknown_key(e);
    }
  }

  for (ServiceStation& st : spec.network.stations) {
    for (const std::string& field : global_fields) {
      if (station_fields.contains({st.id, field})) continue;
      const double v = field == "mean_s" ? global_service.mean_s
                       : field == "sd_s" ? global_service.sd_s
                                         : global_service.min_s;
      set_service_field(st.service, field, v);
    }
  }
  return spec;
}

std::string serialize_scenario(const ScenarioSpec& spec) {
  std::string out;
  auto line = [&](std::string_view key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };

  line("label", spec.label);
  line("hgv_share", num(spec.hgv_share));
  line("class.car.pce", num(spec.car.pce));
  line("class.hgv.pce", num(spec.hgv.pce));

  line("flow.segment_s", num(spec.flow.segment_s));
  std::string rates;
  const auto& r = spec.flow.rates_veh_per_min;
  for (std::size_t i = 0; i < r.size();) {
    std::size_t j = i;
    while (j < r.size() && std::bit_cast<std::uint64_t>(r[j]) == std::bit_cast<std::uint64_t>(r[i])) ++j;
    if (!rates.empty()) rates += ", ";
    rates += num(r[i]);
    if (j - i > 1) rates += "*" + std::to_string(j - i);
    i = j;
  }
  line("flow.rates", rates);

  line("policy.adoption_fraction", num(spec.policy.adoption_fraction));
  line("policy.eligibility", spec.policy.eligibility == Eligibility::CarsOnly ? "cars" : "all");
  line("policy.on_full", spec.policy.on_full == OnFull::Divert ? "divert" : "block");

  line("network.entry", spec.network.entry);
  for (const Link& link : spec.network.links) {
    line("link." + link.id + ".free_flow_s", num(link.free_flow_s));
    line("link." + link.id + ".capacity_pce", num(link.capacity_pce));
  }
  for (const ServiceStation& st : spec.network.stations) {
    const std::string p = "station." + st.id + ".";
    line(p + "discipline", std::string(to_string(st.discipline)));
    line(p + "lanes", std::to_string(st.lane_count));
    line(p + "capacity_pce", num(st.capacity_pce));
    line(p + "servers", std::to_string(st.servers_open));
    line(p + "service.mean_s", num(st.service.mean_s));
    line(p + "service.sd_s", num(st.service.sd_s));
    line(p + "service.min_s", num(st.service.min_s));
  }
  line("route.manual", join(spec.network.manual.elements));
  line("route.automated", spec.network.automated ? join(spec.network.automated->elements) : "none");
  return out;
}

}  // namespace portsim
