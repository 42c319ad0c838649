#pragma once

#include <string>

#include <json.hpp>

#include "mobsense/control.hpp"
#include "mobsense/qfi.hpp"

namespace mobsense {

using Json = nlohmann::ordered_json;

/// Number with 17 significant digits ("%.17g"); integers print without a
/// fraction. Non-finite values become null in JSON.
std::string format_number(double value);

/// Pretty JSON with every floating-point value at 17 significant digits.
std::string dump_json(const Json& value, int indent = 2);

/// {initial_sign, switch_times[]} or {times[], amplitudes[]}, plus an
/// optional {weight_times[], weights[]} pair.
Json schedule_to_json(const ControlSchedule& schedule);
ControlSchedule schedule_from_json(const Json& value, double horizon);

Json qfi_report_to_json(const QfiReport& report);

}  // namespace mobsense
