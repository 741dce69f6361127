#pragma once

#include <cstdint>
#include <string>

namespace rpglite {

// Timestamps are integer milliseconds since the Unix epoch, written as
// "YYYY-MM-DDTHH:MM:SS.mmmZ".
std::string format_utc_ms(std::int64_t ms);
// Throws Error(ParseError) on anything else.
std::int64_t parse_utc_ms(const std::string& text);
// "YYYY-MM-DD" of a timestamp.
std::string utc_date(std::int64_t ms);
std::int64_t now_utc_ms();

}  // namespace rpglite
