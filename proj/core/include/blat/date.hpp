#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace blat {

using Date = std::chrono::sys_days;

/// Parses an ISO-8601 calendar date (YYYY-MM-DD). Throws ParseError(text).
Date parse_date(std::string_view text);

std::string format_date(Date date);

}  // namespace blat
