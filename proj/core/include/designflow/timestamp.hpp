#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <string_view>

namespace designflow {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Clock = std::function<Timestamp()>;

Timestamp now_utc();

/// "2025-10-01T12:34:56.789Z"
std::string format_iso8601(Timestamp t);

/// Accepts the format produced by format_iso8601 (fraction optional).
Timestamp parse_iso8601(std::string_view text);

/// "2025-10-01"
std::string format_iso_date(std::chrono::year_month_day date);

}  // namespace designflow
