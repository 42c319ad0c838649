#include "mobsense/json_io.hpp"

#include <cmath>
#include <cstdio>

#include "mobsense/errors.hpp"

namespace mobsense {

std::string format_number(double value) {
  if (!std::isfinite(value)) return "null";
  if (value == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

void write(const Json& v, int indent, int level, std::string& out) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (level + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * level), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        out += Json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        write(it.value(), indent, level + 1, out);
      }
      out += nl;
      out += close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool scalars = true;
      for (const auto& e : v) scalars = scalars && !e.is_structured();
      out += "[";
      if (!scalars) out += nl;
      bool first = true;
      for (const auto& e : v) {
        if (!first) {
          out += ",";
          out += scalars ? (indent > 0 ? " " : "") : nl;
        }
        first = false;
        if (!scalars) out += pad;
        write(e, indent, level + 1, out);
      }
      if (!scalars) {
        out += nl;
        out += close_pad;
      }
      out += "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_number(v.get<double>());
      return;
    default:
      out += v.dump();
      return;
  }
}

std::vector<double> number_array(const Json& v, const char* key) {
  if (!v.contains(key) || !v.at(key).is_array()) {
    throw ConfigError(std::string("schedule needs a numeric array '") + key + "'");
  }
  std::vector<double> out;
  for (const auto& e : v.at(key)) {
    if (!e.is_number()) throw ConfigError(std::string("'") + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Json numbers(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

}  // namespace

std::string dump_json(const Json& value, int indent) {
  std::string out;
  write(value, indent, 0, out);
  out += "\n";
  return out;
}

Json schedule_to_json(const ControlSchedule& schedule) {
  Json j;
  if (const auto* s = schedule.sign_switch()) {
    j["initial_sign"] = s->initial_sign;
    j["switch_times"] = numbers(s->switch_times);
  } else {
    j["times"] = numbers(schedule.amplitude()->times);
    j["amplitudes"] = numbers(schedule.amplitude()->values);
  }
  if (schedule.weight()) {
    j["weight_times"] = numbers(schedule.weight()->times);
    j["weights"] = numbers(schedule.weight()->values);
  }
  return j;
}

ControlSchedule schedule_from_json(const Json& value, double horizon) {
  if (!value.is_object()) throw ConfigError("schedule must be a JSON object");
  std::optional<WeightProfile> weight;
  if (value.contains("weights")) {
    weight = WeightProfile{number_array(value, "weight_times"), number_array(value, "weights"), {}};
  }
  if (value.contains("initial_sign")) {
    if (!value.at("initial_sign").is_number_integer()) throw ConfigError("initial_sign must be +1 or -1");
    SignSwitch s{value.at("initial_sign").get<int>(), number_array(value, "switch_times")};
    return ControlSchedule(std::move(s), horizon, std::move(weight));
  }
  if (value.contains("amplitudes")) {
    Amplitude a{number_array(value, "times"), number_array(value, "amplitudes")};
    return ControlSchedule(std::move(a), horizon, std::move(weight));
  }
  throw ConfigError("schedule needs either initial_sign/switch_times or times/amplitudes");
}

Json qfi_report_to_json(const QfiReport& report) {
  Json j;
  j["bound"] = report.bound;
  j["method"] = report.method;
  j["gap_samples"] = numbers(report.gap_samples);
  return j;
}

}  // namespace mobsense
